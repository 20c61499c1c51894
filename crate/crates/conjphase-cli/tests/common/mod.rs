//! Shared helpers for the integration suites: a binary driver and the
//! seeded signal draws the protocols call for.
#![allow(dead_code)] // each suite uses its own subset

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use conjphase::graph::SimpleGraph;
use conjphase::vector::ComplexVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Non-collinearity margin the protocols demand before recovery.
pub const MARGIN: f64 = 1e-6;

/// What one binary invocation produced.
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the compiled `conjphase` binary in `dir` and captures everything.
pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_conjphase"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// A fresh scratch directory for one test.
pub fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conjphase-test-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("scratch directory");
    dir
}

/// Deterministic generator for a protocol seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: unit-variance total, split over re and im.
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / 2.0_f64.sqrt()
}

/// A vector of independent standard complex normals.
pub fn random_vector(rng: &mut impl Rng, index_offset: i64, len: usize) -> ComplexVector {
    ComplexVector::new(index_offset, (0..len).map(|_| complex_normal(rng)).collect())
}

/// A real nonvanishing vector: normals redrawn until they clear 1e-3.
pub fn random_real_vector(rng: &mut impl Rng, index_offset: i64, len: usize) -> ComplexVector {
    let values = (0..len)
        .map(|_| loop {
            let x: f64 = rng.sample(StandardNormal);
            if x.abs() >= 1e-3 {
                return Complex64::new(x, 0.0);
            }
        })
        .collect();
    ComplexVector::new(index_offset, values)
}

/// Relative non-collinearity margin of one pair: `(|a||b| − |Re(a·conj b)|) / (|a||b|)`.
pub fn pair_margin(a: Complex64, b: Complex64) -> f64 {
    let product = a.norm() * b.norm();
    if product == 0.0 {
        return 0.0;
    }
    (product - (a * b.conj()).re.abs()) / product
}

/// Worst margin over consecutive index pairs.
pub fn min_adjacent_margin(v: &ComplexVector) -> f64 {
    let span = v.logical_range();
    let mut worst = f64::INFINITY;
    for n in span.start..span.end - 1 {
        worst = worst.min(pair_margin(v.get(n), v.get(n + 1)));
    }
    worst
}

/// Worst margin over the edges of a measurement graph.
pub fn min_edge_margin(v: &ComplexVector, g: &SimpleGraph) -> f64 {
    let mut worst = f64::INFINITY;
    for (a, b) in g.edges() {
        worst = worst.min(pair_margin(v.get(a), v.get(b)));
    }
    worst
}

/// Redraws until every adjacent pair clears the margin.
pub fn noncollinear_vector(rng: &mut impl Rng, index_offset: i64, len: usize) -> ComplexVector {
    loop {
        let v = random_vector(rng, index_offset, len);
        if min_adjacent_margin(&v) > MARGIN {
            return v;
        }
    }
}

/// Redraws until every graph edge clears the margin.
pub fn graph_noncollinear_vector(
    rng: &mut impl Rng,
    index_offset: i64,
    len: usize,
    g: &SimpleGraph,
) -> ComplexVector {
    loop {
        let v = random_vector(rng, index_offset, len);
        if min_edge_margin(&v, g) > MARGIN {
            return v;
        }
    }
}
