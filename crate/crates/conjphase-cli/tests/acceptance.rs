//! The acceptance gate: ten checks covering the magnitude-collision pair,
//! triangle-graph census, every recovery scheme's round-trip accuracy,
//! brute-force and quadrature oracles, and failure diagnosis. Each test
//! prints one `ACCEPTANCE NN …: PASS` line (visible under
//! `cargo test --test acceptance -- --show-output`) and enforces its own
//! wall-clock budget.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use common::{
    graph_noncollinear_vector, noncollinear_vector, pair_margin, random_real_vector,
    random_vector, rng_for, run_in, workdir, MARGIN,
};
use conjphase::error::Error;
use conjphase::graph::{
    circulant_graph, propagate_recover, two_reference_graph, Diagnosis, TriangleGraph,
};
use conjphase::measure::measure;
use conjphase::oracles::{
    brute_force_dist_conj, brute_force_link_count, brute_force_triangles, quadrature_correlation,
};
use conjphase::recover::{recover_adjacent, recover_two_reference, solve_triple, StructuredSamples};
use conjphase::scheme::{SchemeSpec, StrategyRegistry};
use conjphase::spaces::{
    counterexample_pair, pw_magnitude_interp_check, si_half_integer_ids, si_sample_half_integer,
    Generator, PwSignal, SiSignal,
};
use conjphase::stft::{correlation_sequence, Window};
use conjphase::vector::{dist_conj, ComplexVector};
use conjphase::formats::Signal;
use conjphase::DEFAULT_TOL;
use num_complex::Complex64;
use rand::Rng;

fn pass(ordinal: u32, label: &str, start: Instant, detail: &str) {
    println!("ACCEPTANCE {ordinal:02} {label}: PASS ({detail}; {:.1?})", start.elapsed());
}

fn budget(start: Instant, seconds: u64) {
    let limit = Duration::from_secs(seconds);
    assert!(start.elapsed() < limit, "budget {limit:?} exceeded: {:?}", start.elapsed());
}

#[test]
fn a01_distinct_classes_with_identical_magnitudes() {
    let start = Instant::now();
    let (f, g) = counterexample_pair();
    let mut max_gap = 0.0_f64;
    for k in 0..=5000 {
        let x = -1.0 + k as f64 * 1e-3;
        max_gap = max_gap.max((f.eval(x).norm_sqr() - g.eval(x).norm_sqr()).abs());
    }
    assert!(max_gap <= 1e-12, "magnitude gap {max_gap:e}");
    let (d, _) = dist_conj(f.coeffs(), g.coeffs());
    assert!((d - 2.0).abs() <= 1e-12, "class distance {d}");
    budget(start, 1);
    pass(1, "distinct classes share all magnitudes", start, &format!("gap {max_gap:e}, dist {d}"));
}

/// Degrees and connectivity of a triangle graph, from its adjacency lists.
fn cycle_shape(gf: &TriangleGraph) -> (bool, usize) {
    let adj = gf.adjacency();
    let degrees_ok = adj.iter().all(|n| n.len() == 2);
    let mut seen = vec![false; adj.len()];
    let mut queue = vec![0_usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = queue.pop() {
        for &(j, _) in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                reached += 1;
                queue.push(j);
            }
        }
    }
    (degrees_ok, reached)
}

#[test]
fn a02_triangle_graph_census_on_both_families() {
    let start = Instant::now();

    // Circulant(8, {1, 2}): eight triangles chained in a single cycle.
    let g = circulant_graph(8, &[1, 2]);
    let f = ComplexVector::new(0, (0..8).map(|n| Complex64::from_polar(1.0, n as f64 * PI / 5.0)).collect());
    let m = measure(&f, &g);
    let gf = conjphase::graph::build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();
    assert_eq!(gf.nodes.len(), 8);
    assert_eq!(gf.links.len(), 8);
    let (degrees_ok, reached) = cycle_shape(&gf);
    assert!(degrees_ok, "every node needs exactly two links for a single cycle");
    assert_eq!(reached, 8, "cycle must be connected");
    assert_eq!(brute_force_triangles(&g).len(), 8);
    assert_eq!(brute_force_link_count(&g, &m, DEFAULT_TOL), 8);

    // Two-reference(8; 4, 5): six triangles, pairwise linked through (4, 5).
    let g2 = two_reference_graph(8, 4, 5).unwrap();
    let f2 = ComplexVector::new(1, (1..=8).map(|n| Complex64::from_polar(1.0, n as f64 * PI / 5.0)).collect());
    let m2 = measure(&f2, &g2);
    let gf2 = conjphase::graph::build_triangle_graph(&g2, &m2, DEFAULT_TOL).unwrap();
    assert_eq!(gf2.nodes.len(), 6);
    assert_eq!(gf2.links.len(), 15);
    // Complete: every unordered node pair appears exactly once.
    let mut pairs: Vec<(usize, usize)> = gf2.links.iter().map(|l| (l.a, l.b)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    assert_eq!(pairs.len(), 15);
    assert!(gf2.links.iter().all(|l| l.shared_edge == (4, 5)));
    assert_eq!(brute_force_triangles(&g2).len(), 6);
    assert_eq!(brute_force_link_count(&g2, &m2, DEFAULT_TOL), 15);

    budget(start, 1);
    pass(2, "triangle-graph census", start, "8 nodes/8 links cyclic; 6 nodes/15 links complete");
}

#[test]
fn a03_adjacent_pair_round_trips_to_nine_digits() {
    let start = Instant::now();
    let mut rng = rng_for(0xA3);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let len = rng.random_range(4..=64);
        let v = noncollinear_vector(&mut rng, 0, len);
        let s = StructuredSamples::measure_adjacent12(&v);
        let (vhat, _) = recover_adjacent(&s, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&vhat, &v);
        let relative = d / v.norm();
        assert!(relative <= 1e-9, "relative distance {relative:e} at length {len}");
        worst = worst.max(relative);
    }
    budget(start, 10);
    pass(3, "adjacent-pair scheme, 1000 trials", start, &format!("worst relative {worst:e}"));
}

#[test]
fn a04_shift_invariant_two_reference_round_trips() {
    let start = Instant::now();
    let registry = StrategyRegistry::with_builtins();
    let mut rng = rng_for(0xA4);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let len = rng.random_range(4..=64_i64);
        let (j_lo, j_hi) = si_half_integer_ids(Generator::Hat, 0, len - 1);
        let k = (j_lo + j_hi) / 2;
        let refs = [k, k + 1];
        let signal = loop {
            let s = SiSignal::new(Generator::Hat, random_vector(&mut rng, 0, len as usize));
            let samples = si_sample_half_integer(&s);
            if pair_margin(samples.get(refs[0]), samples.get(refs[1])) > MARGIN {
                break s;
            }
        };
        let spec = SchemeSpec::TwoReference { refs };
        let strategy = registry.get(spec.strategy_name()).unwrap();
        let truth = Signal::Si(signal);
        let data = strategy.measure(&truth, &spec).unwrap();
        let (recovered, _) = strategy.recover(&data, &spec, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(recovered.coeff_vector(), truth.coeff_vector());
        let relative = d / truth.coeff_vector().norm();
        assert!(relative <= 1e-9, "relative distance {relative:e} at length {len}");
        worst = worst.max(relative);
    }
    budget(start, 10);
    pass(4, "shift-invariant two-reference scheme, 1000 trials", start, &format!("worst relative {worst:e}"));
}

#[test]
fn a05_propagation_agrees_with_the_closed_forms() {
    let start = Instant::now();
    let mut rng = rng_for(0xA5);
    let mut worst = 0.0_f64;

    for _ in 0..100 {
        let n = rng.random_range(7..=32_u32);
        let g = circulant_graph(n, &[1, 2]);
        let v = graph_noncollinear_vector(&mut rng, 0, n as usize, &g);
        let (a, _) = propagate_recover(&g, &measure(&v, &g), DEFAULT_TOL).unwrap();
        let s = StructuredSamples::measure_adjacent12(&v);
        let (b, _) = recover_adjacent(&s, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&a, &b);
        let relative = d / v.norm();
        assert!(relative <= 1e-9, "circulant mutual distance {relative:e} at n = {n}");
        worst = worst.max(relative);
    }

    for _ in 0..100 {
        let n = rng.random_range(6..=32_u32);
        let (k, l) = (i64::from(n) / 2, i64::from(n) / 2 + 1);
        let g = two_reference_graph(n, k, l).unwrap();
        let v = graph_noncollinear_vector(&mut rng, 1, n as usize, &g);
        let (a, _) = propagate_recover(&g, &measure(&v, &g), DEFAULT_TOL).unwrap();
        let s = StructuredSamples::measure_two_reference(&v, k, l).unwrap();
        let (b, _) = recover_two_reference(&s, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&a, &b);
        let relative = d / v.norm();
        assert!(relative <= 1e-9, "two-reference mutual distance {relative:e} at n = {n}");
        worst = worst.max(relative);
    }

    budget(start, 10);
    pass(5, "propagation vs closed forms, 200 trials", start, &format!("worst relative {worst:e}"));
}

#[test]
fn a06_magnitude_triples_solve_and_match_the_exhaustive_search() {
    let start = Instant::now();
    let mut rng = rng_for(0xA6);
    let mut worst_mag = 0.0_f64;
    let mut worst_class = 0.0_f64;
    for _ in 0..10_000 {
        let z: Vec<Complex64> = random_vector(&mut rng, 0, 3).iter().map(|(_, z)| z).collect();
        let abs = [z[0].norm(), z[1].norm(), z[2].norm()];
        let rel = [(z[0] - z[1]).norm(), (z[0] - z[2]).norm(), (z[1] - z[2]).norm()];
        let scale = abs.iter().chain(&rel).fold(1.0_f64, |m, &v| m.max(v));

        let sol = solve_triple(&abs, &rel, DEFAULT_TOL).unwrap();
        let got = [
            sol.get(0).norm(),
            sol.get(1).norm(),
            sol.get(2).norm(),
            (sol.get(0) - sol.get(1)).norm(),
            (sol.get(0) - sol.get(2)).norm(),
            (sol.get(1) - sol.get(2)).norm(),
        ];
        let want = [abs[0], abs[1], abs[2], rel[0], rel[1], rel[2]];
        for (g, w) in got.iter().zip(&want) {
            let err = (g - w).abs() / scale;
            assert!(err <= 1e-12, "magnitude error {err:e}");
            worst_mag = worst_mag.max(err);
        }

        let truth = ComplexVector::new(0, z);
        let class = brute_force_dist_conj(&sol, &truth) / scale;
        assert!(class <= 1e-8, "class distance {class:e} by exhaustive search");
        worst_class = worst_class.max(class);
    }
    budget(start, 30);
    pass(
        6,
        "triple solver vs exhaustive search, 10^4 trials",
        start,
        &format!("worst magnitude error {worst_mag:e}, worst class {worst_class:e}"),
    );
}

#[test]
fn a07_sign_recovery_is_exact() {
    let start = Instant::now();
    let mut rng = rng_for(0xA7);
    for _ in 0..1000 {
        let len = rng.random_range(2..=64);
        let v = random_real_vector(&mut rng, 0, len);
        let s = StructuredSamples::measure_signs(&v);
        let (vhat, _) = conjphase::recover::recover_signs(&s, DEFAULT_TOL).unwrap();
        let truth: Vec<i32> = v.iter().map(|(_, z)| z.re.signum() as i32).collect();
        let got: Vec<i32> = vhat.iter().map(|(_, z)| z.re.signum() as i32).collect();
        let flipped: Vec<i32> = got.iter().map(|s| -s).collect();
        assert!(
            truth == got || truth == flipped,
            "sign pattern differs beyond a global flip"
        );
    }
    budget(start, 5);
    pass(7, "sign recovery, 1000 real vectors", start, "all patterns exact up to global sign");
}

// Regression ceiling for the interpolation quality, frozen from the first
// seeded run of this exact protocol: observed worst relative deviation
// 1.825e-6, pinned here with 2x headroom against platform rounding drift.
const INTERP_REGRESSION_CEILING: f64 = 3.65e-6;

#[test]
fn a08_double_rate_magnitudes_interpolate_the_envelope() {
    let start = Instant::now();
    let mut rng = rng_for(0xA8);
    let mut worst_relative = 0.0_f64;
    for _ in 0..50 {
        let coeffs = random_vector(&mut rng, 0, 8);
        let s = PwSignal::new(0.5, 0.0, coeffs).unwrap();
        let check = pw_magnitude_interp_check(&s, 0.05, 128);
        assert!(check.peak > 0.0);
        assert!(
            check.max_deviation <= 1e-2 * check.peak,
            "deviation {} vs peak {}",
            check.max_deviation,
            check.peak
        );
        worst_relative = worst_relative.max(check.max_deviation / check.peak);
    }
    assert!(
        worst_relative <= INTERP_REGRESSION_CEILING,
        "interpolation quality regressed: {worst_relative:e}"
    );
    budget(start, 10);
    pass(8, "double-rate magnitude interpolation, 50 signals", start, &format!("worst relative deviation {worst_relative:e}"));
}

#[test]
fn a09_correlations_match_quadrature_and_deconvolution_round_trips() {
    let start = Instant::now();
    let mut rng = rng_for(0xA9);

    // Tap-convolution formula against direct numerical integration.
    let mut worst_quad = 0.0_f64;
    for _ in 0..20 {
        let len = rng.random_range(4..=8);
        let c = random_vector(&mut rng, 0, len);
        let tap_count = rng.random_range(2..=3_usize);
        let taps: Vec<f64> = (0..tap_count)
            .map(|_| {
                let mag = rng.random_range(0.5..1.5);
                if rng.random_bool(0.5) { -mag } else { mag }
            })
            .collect();
        let w = Window::new(0.5, 0, taps).unwrap();
        let f = PwSignal::new(0.5, 0.0, c.clone()).unwrap();
        let h = correlation_sequence(&c, &w);
        let span = h.logical_range();
        for j in span.start..span.end {
            let direct = quadrature_correlation(&f, &w, j, 400.0);
            let gap = (h.get(j) - direct).norm();
            assert!(gap <= 1e-6, "lag {j}: formula vs quadrature gap {gap:e}");
            worst_quad = worst_quad.max(gap);
        }
    }

    // End-to-end: windowed magnitudes back to the coefficients.
    let registry = StrategyRegistry::with_builtins();
    let mut worst_rel = 0.0_f64;
    for _ in 0..200 {
        let len = rng.random_range(4..=16);
        let (signal, spec) = loop {
            let c = random_vector(&mut rng, 0, len);
            let tap_count = rng.random_range(2..=3_usize);
            let taps: Vec<f64> = (0..tap_count)
                .map(|_| {
                    let mag = rng.random_range(0.5..1.5);
                    if rng.random_bool(0.5) { -mag } else { mag }
                })
                .collect();
            let w = Window::new(0.5, 0, taps).unwrap();
            let h = correlation_sequence(&c, &w);
            let span = h.logical_range();
            let margins_ok = (span.start..span.end - 1)
                .all(|n| pair_margin(h.get(n), h.get(n + 1)) > MARGIN);
            if margins_ok {
                break (Signal::Pw(PwSignal::new(0.5, 0.0, c).unwrap()), SchemeSpec::Stft { window: w });
            }
        };
        let strategy = registry.get(spec.strategy_name()).unwrap();
        let data = strategy.measure(&signal, &spec).unwrap();
        let (recovered, _) = strategy.recover(&data, &spec, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(recovered.coeff_vector(), signal.coeff_vector());
        let relative = d / signal.coeff_vector().norm();
        assert!(relative <= 1e-8, "relative distance {relative:e} at length {len}");
        worst_rel = worst_rel.max(relative);
    }

    budget(start, 30);
    pass(
        9,
        "windowed correlations, quadrature + 200 round trips",
        start,
        &format!("worst quadrature gap {worst_quad:e}, worst relative {worst_rel:e}"),
    );
}

#[test]
fn a10_failures_are_diagnosed_not_mangled() {
    let start = Instant::now();

    // A real signal has no non-collinear pair; the binary must refuse with
    // the hypothesis exit code.
    let dir = workdir("acceptance-failures");
    run_in(&dir, &["gen", "--len", "6", "--real", "--seed", "3", "--out", "r.json"]);
    run_in(&dir, &["measure", "r.json", "--scheme", "adjacent12", "--out", "rd.json"]);
    let out = run_in(&dir, &["recover", "rd.json", "--out", "rh.json"]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stderr.contains("collinear"), "{}", out.stderr);

    // A triangle-free graph must name every uncovered vertex.
    let g = circulant_graph(6, &[1]);
    let v = ComplexVector::new(0, (0..6).map(|n| Complex64::new(1.0 + n as f64, 0.5 * n as f64)).collect());
    let err = propagate_recover(&g, &measure(&v, &g), DEFAULT_TOL).unwrap_err();
    match err {
        Error::HypothesisFailed(Diagnosis::UncoveredVertices(vs)) => {
            assert_eq!(vs, vec![0, 1, 2, 3, 4, 5]);
        }
        other => panic!("expected uncovered vertices, got {other}"),
    }

    // Magnitudes violating the triangle inequality beyond tolerance are
    // rejected as infeasible, in the solver and at the process boundary.
    let err = solve_triple(&[1.0, 1.0, 1.0], &[2.0 + 1e-5, 1.0, 1.0], 1e-6).unwrap_err();
    assert!(matches!(err, Error::InfeasibleMagnitudes(_)), "{err}");
    fs::write(
        dir.join("infeasible.json"),
        r#"{"scheme":"adjacent12","index_offset":0,"abs":[1.0,1.0,1.0],"rel1":[3.0,0.5],"rel2":[1.0]}"#,
    )
    .unwrap();
    let out = run_in(&dir, &["recover", "infeasible.json", "--out", "x.json"]);
    assert_eq!(out.code, 4, "{}", out.stderr);

    budget(start, 10);
    pass(10, "failure diagnosis", start, "collinear exit 3, uncovered vertices named, infeasible exit 4");
}

