//! Bundled demonstration datasets.
//!
//! Each demo writes a self-contained directory of JSON/CSV files and prints
//! a short transcript: the ambiguity counterexample (two shift-invariant
//! signals sharing every pointwise magnitude), and two measurement-graph
//! walkthroughs (a circulant graph with a cyclic clique structure and a
//! two-reference graph with a complete one).

use std::f64::consts::PI;
use std::path::Path;

use conjphase::error::Result;
use conjphase::formats::{measurement_to_json, signal_to_json, MeasurementFile, Signal};
use conjphase::graph::{
    build_triangle_graph, check_hypothesis, circulant_graph, propagate_recover, two_reference_graph,
    SimpleGraph,
};
use conjphase::measure::measure;
use conjphase::spaces::counterexample_pair;
use conjphase::vector::{dist_conj, ComplexVector, EquivalenceBranch};
use num_complex::Complex64;
use serde::Serialize;

use crate::io::{csv_number, json_line, write_text};

/// Transcript record of the counterexample demo.
#[derive(Serialize)]
struct CounterexampleSummary {
    /// Worst `||f|² − |g|²|` over the evaluation grid.
    max_magnitude_gap: f64,
    /// Class distance between the coefficient vectors.
    coeff_dist: f64,
    /// Winning alignment of the coefficient comparison.
    branch: EquivalenceBranch,
}

/// Transcript record of a measurement-graph demo.
#[derive(Serialize)]
struct GraphDemoSummary {
    /// Number of 3-cliques.
    nodes: usize,
    /// Number of certified links between cliques.
    links: usize,
    /// Hypothesis diagnosis (`"ok"` when recoverable).
    diagnosis: conjphase::graph::Diagnosis,
    /// Recovery distance relative to the signal norm.
    relative_dist: f64,
}

/// Two shift-invariant signals no magnitude measurement can tell apart:
/// equal `|·|²` everywhere, yet coefficient classes at distance 2.
pub fn run_counterexample(out_dir: &Path, _tol: f64) -> Result<()> {
    let (f, g) = counterexample_pair();
    write_text(&out_dir.join("f.json"), &json_line(signal_to_json(&Signal::Si(f.clone()))))?;
    write_text(&out_dir.join("g.json"), &json_line(signal_to_json(&Signal::Si(g.clone()))))?;

    let mut csv = String::from("x,f_abs_sq,g_abs_sq\n");
    let mut max_gap = 0.0_f64;
    for k in 0..=5000 {
        let x = -1.0 + k as f64 * 1e-3;
        let fa = f.eval(x).norm_sqr();
        let ga = g.eval(x).norm_sqr();
        max_gap = max_gap.max((fa - ga).abs());
        csv.push_str(&format!("{},{},{}\n", csv_number(x), csv_number(fa), csv_number(ga)));
    }
    write_text(&out_dir.join("magnitudes.csv"), &csv)?;

    let (coeff_dist, branch) = dist_conj(f.coeffs(), g.coeffs());
    let summary = CounterexampleSummary { max_magnitude_gap: max_gap, coeff_dist, branch };
    write_text(
        &out_dir.join("summary.json"),
        &json_line(serde_json::to_string(&summary).expect("summary serializes")),
    )?;

    println!("max ||f|^2 - |g|^2| over [-1, 4] at step 1e-3: {max_gap:e}");
    println!("coefficient class distance: {coeff_dist}");
    Ok(())
}

/// Cyclic walkthrough: unimodular signal on a circulant graph whose eight
/// 3-cliques chain into a single cycle.
pub fn run_circulant(out_dir: &Path, tol: f64) -> Result<()> {
    let f = ComplexVector::new(
        0,
        (0..8).map(|n| Complex64::from_polar(1.0, n as f64 * PI / 5.0)).collect(),
    );
    let g = circulant_graph(8, &[1, 2]);
    run_graph_demo(out_dir, &f, &g, tol)
}

/// Complete walkthrough: parabola-phased signal on a two-reference graph
/// whose six 3-cliques all see the reference edge, giving a complete
/// triangle graph.
pub fn run_two_ref(out_dir: &Path, tol: f64) -> Result<()> {
    let f = ComplexVector::new(
        1,
        (1..=8).map(|n| Complex64::new(n as f64, (n * n) as f64)).collect(),
    );
    let g = two_reference_graph(8, 4, 5)?;
    run_graph_demo(out_dir, &f, &g, tol)
}

fn run_graph_demo(out_dir: &Path, f: &ComplexVector, g: &SimpleGraph, tol: f64) -> Result<()> {
    write_text(&out_dir.join("signal.json"), &json_line(signal_to_json(&Signal::Vector(f.clone()))))?;
    write_text(
        &out_dir.join("graph.json"),
        &json_line(serde_json::to_string(g).expect("graph serializes")),
    )?;

    let m = measure(f, g);
    write_text(
        &out_dir.join("measurement.json"),
        &json_line(measurement_to_json(&MeasurementFile::Graph(m.clone()))),
    )?;

    let gf = build_triangle_graph(g, &m, tol)?;
    write_text(
        &out_dir.join("triangle_graph.json"),
        &json_line(serde_json::to_string(&gf).expect("triangle graph serializes")),
    )?;
    let diagnosis = check_hypothesis(g, &gf);

    let (recovered, report) = propagate_recover(g, &m, tol)?;
    write_text(
        &out_dir.join("recovered.json"),
        &json_line(signal_to_json(&Signal::Vector(recovered.clone()))),
    )?;
    write_text(
        &out_dir.join("report.json"),
        &json_line(serde_json::to_string(&report).expect("report serializes")),
    )?;

    let (d, _) = dist_conj(&recovered, f);
    let relative_dist = d / f.norm();
    let summary =
        GraphDemoSummary { nodes: gf.nodes.len(), links: gf.links.len(), diagnosis, relative_dist };
    write_text(
        &out_dir.join("summary.json"),
        &json_line(serde_json::to_string(&summary).expect("summary serializes")),
    )?;

    println!("triangle nodes: {}", gf.nodes.len());
    println!("triangle links: {}", gf.links.len());
    println!("hypothesis: {}", summary.diagnosis);
    println!("recovery distance (relative): {relative_dist:e}");
    Ok(())
}
