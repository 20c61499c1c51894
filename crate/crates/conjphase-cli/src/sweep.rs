//! Seeded measure→recover→compare round trips across every scheme.
//!
//! Each trial derives its own seed from the master seed, drafts a signal
//! that clears the non-collinearity margins its scheme needs, runs the
//! registry round trip, and records the class distance relative to the
//! signal norm. Trials run concurrently; results aggregate in trial order,
//! so the summary is byte-identical for identical flags.

use std::collections::BTreeMap;

use conjphase::error::Result;
use conjphase::formats::Signal;
use conjphase::graph::{circulant_graph, two_reference_graph, SimpleGraph};
use conjphase::scheme::{SchemeSpec, StrategyRegistry};
use conjphase::spaces::{si_half_integer_ids, si_sample_half_integer, Generator, PwSignal, SiSignal};
use conjphase::stft::{correlation_sequence, Window};
use conjphase::vector::{dist_conj, ComplexVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::sample::{
    min_adjacent_margin, min_edge_margin, noncollinear_vector, pair_margin, random_real_vector,
    random_vector, resampling_exhausted, rng_for, trial_seed, MARGIN_FLOOR, MAX_TRIES,
};

/// Every sweep case, in execution order.
pub const CASES: [&str; 6] =
    ["adjacent12", "two-ref-si", "sign", "stft", "graph-circulant", "graph-two-ref"];

/// What one sweep run was asked to do.
pub struct SweepConfig {
    /// Number of independent trials.
    pub trials: usize,
    /// Master seed; trial seeds derive from it.
    pub seed: u64,
    /// Cases to run (subset of [`CASES`]).
    pub cases: Vec<String>,
    /// Smallest random signal length.
    pub min_len: usize,
    /// Largest random signal length.
    pub max_len: usize,
    /// Recovery tolerance.
    pub tol: f64,
}

/// Aggregated outcome of one case across all trials.
#[derive(Serialize)]
pub struct CaseSummary {
    /// Trials attempted.
    pub trials: usize,
    /// Trials whose relative distance exceeded the pass threshold.
    pub failures: usize,
    /// Worst relative class distance seen.
    pub worst_relative_dist: f64,
    /// Pass threshold for this case.
    pub threshold: f64,
}

/// The whole sweep, serialized to stdout.
#[derive(Serialize)]
pub struct SweepSummary {
    /// Number of trials.
    pub trials: usize,
    /// Master seed.
    pub seed: u64,
    /// Per-case aggregates, keyed by case name.
    pub cases: BTreeMap<String, CaseSummary>,
}

impl SweepSummary {
    /// Total failures across cases.
    pub fn failures(&self) -> usize {
        self.cases.values().map(|c| c.failures).sum()
    }
}

/// Relative-distance bar a case must stay under to pass.
fn threshold_for(case: &str) -> f64 {
    match case {
        // Sign recovery is exact arithmetic on measured moduli.
        "sign" => 1e-12,
        // The window deconvolution amplifies recursion error by the
        // conditioning of the tap matrix.
        "stft" => 1e-8,
        _ => 1e-9,
    }
}

/// Runs the whole sweep and aggregates per-case results.
pub fn run(cfg: &SweepConfig) -> Result<SweepSummary> {
    let registry = StrategyRegistry::with_builtins();
    let rows: Result<Vec<Vec<(&str, f64)>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &registry, t as u64))
        .collect();
    let rows = rows?;

    let mut cases: BTreeMap<String, CaseSummary> = BTreeMap::new();
    for row in rows {
        for (name, relative) in row {
            let entry = cases.entry(name.to_string()).or_insert_with(|| CaseSummary {
                trials: 0,
                failures: 0,
                worst_relative_dist: 0.0,
                threshold: threshold_for(name),
            });
            entry.trials += 1;
            entry.worst_relative_dist = entry.worst_relative_dist.max(relative);
            if relative > entry.threshold {
                entry.failures += 1;
            }
        }
    }
    Ok(SweepSummary { trials: cfg.trials, seed: cfg.seed, cases })
}

/// One trial: every requested case on fresh draws from the trial's stream.
fn run_trial(
    cfg: &SweepConfig,
    registry: &StrategyRegistry,
    index: u64,
) -> Result<Vec<(&'static str, f64)>> {
    let mut rng = rng_for(trial_seed(cfg.seed, index));
    let mut results = Vec::with_capacity(cfg.cases.len());
    for case in &cfg.cases {
        let name = CASES
            .iter()
            .copied()
            .find(|n| n == case)
            .expect("cases validated before the sweep starts");
        let len = rng.random_range(cfg.min_len..=cfg.max_len);
        let (truth, spec) = draft(&mut rng, name, len)?;
        let relative = round_trip(registry, &truth, &spec, cfg.tol)?;
        results.push((name, relative));
    }
    Ok(results)
}

/// Drafts a qualifying (signal, scheme) pair for one case.
fn draft(rng: &mut impl Rng, case: &str, len: usize) -> Result<(Signal, SchemeSpec)> {
    match case {
        "adjacent12" => {
            let v = noncollinear_vector(rng, 0, len.max(2))?;
            Ok((Signal::Vector(v), SchemeSpec::Adjacent12))
        }
        "two-ref-si" => {
            let len = len.max(2);
            let (j_lo, j_hi) = si_half_integer_ids(Generator::Hat, 0, len as i64 - 1);
            let k = (j_lo + j_hi) / 2;
            let l = k + 1;
            for _ in 0..MAX_TRIES {
                let s = SiSignal::new(Generator::Hat, random_vector(rng, 0, len));
                let samples = si_sample_half_integer(&s);
                if pair_margin(samples.get(k), samples.get(l)) > MARGIN_FLOOR {
                    return Ok((Signal::Si(s), SchemeSpec::TwoReference { refs: [k, l] }));
                }
            }
            Err(resampling_exhausted("a shift-invariant signal with a non-collinear reference pair"))
        }
        "sign" => {
            let v = random_real_vector(rng, 0, len.max(1));
            Ok((Signal::Vector(v), SchemeSpec::Sign))
        }
        "stft" => {
            let len = len.clamp(4, 16);
            for _ in 0..MAX_TRIES {
                let c = random_vector(rng, 0, len);
                let tap_count = rng.random_range(2..=3_usize);
                let taps: Vec<f64> = (0..tap_count)
                    .map(|_| {
                        let magnitude = rng.random_range(0.5..1.5);
                        if rng.random_bool(0.5) {
                            -magnitude
                        } else {
                            magnitude
                        }
                    })
                    .collect();
                let window = Window::new(0.5, 0, taps)?;
                let h = correlation_sequence(&c, &window);
                if min_adjacent_margin(&h) > MARGIN_FLOOR {
                    let signal = Signal::Pw(PwSignal::new(0.5, 0.0, c)?);
                    return Ok((signal, SchemeSpec::Stft { window }));
                }
            }
            Err(resampling_exhausted("a signal/window pair with non-collinear correlations"))
        }
        "graph-circulant" => {
            let n = len.clamp(7, 64) as u32;
            let g = circulant_graph(n, &[1, 2]);
            let v = edge_noncollinear_vector(rng, 0, n as usize, &g)?;
            Ok((Signal::Vector(v), SchemeSpec::Graph { graph: Some(g) }))
        }
        "graph-two-ref" => {
            let n = len.clamp(6, 64) as u32;
            let k = (n / 2) as i64;
            let g = two_reference_graph(n, k, k + 1)?;
            let v = edge_noncollinear_vector(rng, 1, n as usize, &g)?;
            Ok((Signal::Vector(v), SchemeSpec::Graph { graph: Some(g) }))
        }
        other => unreachable!("unknown sweep case {other}"),
    }
}

/// A random vector all of whose measured graph edges clear the margin.
fn edge_noncollinear_vector(
    rng: &mut impl Rng,
    index_offset: i64,
    len: usize,
    g: &SimpleGraph,
) -> Result<ComplexVector> {
    for _ in 0..MAX_TRIES {
        let v = random_vector(rng, index_offset, len);
        if min_edge_margin(&v, g) > MARGIN_FLOOR {
            return Ok(v);
        }
    }
    Err(resampling_exhausted("a graph signal with non-collinear edges"))
}

/// Measure, recover, and report the relative class distance to the truth.
fn round_trip(
    registry: &StrategyRegistry,
    truth: &Signal,
    spec: &SchemeSpec,
    tol: f64,
) -> Result<f64> {
    let strategy = registry.get(spec.strategy_name()).expect("builtin strategy");
    let data = strategy.measure(truth, spec)?;
    let (recovered, _report) = strategy.recover(&data, spec, tol)?;
    let (d, _) = dist_conj(recovered.coeff_vector(), truth.coeff_vector());
    Ok(d / truth.coeff_vector().norm().max(f64::MIN_POSITIVE))
}
