//! Deterministic random signals and the margins that qualify them.
//!
//! Every random draw flows from a `ChaCha8` stream seeded by a 64-bit
//! value; trial seeds derive from a master seed by a splitmix step, so
//! concurrent trials stay reproducible and independent.

use conjphase::error::{Error, Result};
use conjphase::graph::SimpleGraph;
use conjphase::vector::ComplexVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Margin floor that keeps consecutive pairs solvable in practice.
pub const MARGIN_FLOOR: f64 = 1e-6;

/// Resampling cap: generic draws clear the floor almost surely, so hitting
/// this means the request itself is degenerate.
pub const MAX_TRIES: usize = 500;

/// One splitmix64 step: advances the state and returns a mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one trial of a sweep, derived from the master seed.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut state = master ^ index.wrapping_mul(0xA076_1D64_78BD_642F);
    splitmix64(&mut state)
}

/// The deterministic generator behind every random draw.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: unit expected squared modulus.
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / f64::sqrt(2.0)
}

/// A vector of standard complex normal entries.
pub fn random_vector(rng: &mut impl Rng, index_offset: i64, len: usize) -> ComplexVector {
    ComplexVector::new(index_offset, (0..len).map(|_| complex_normal(rng)).collect())
}

/// A real normal vector bounded away from zero (sign recovery needs every
/// sample nonvanishing).
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

/// Relative non-collinearity margin of a value pair: `1 − |cos θ|` scaled
/// by the moduli, i.e. `(|a||b| − |Re(a·conj b)|) / (|a||b|)`; zero when
/// either value vanishes.
pub fn pair_margin(a: Complex64, b: Complex64) -> f64 {
    let product = a.norm() * b.norm();
    if product == 0.0 {
        return 0.0;
    }
    (product - (a * b.conj()).re.abs()) / product
}

/// Smallest relative margin over consecutive pairs; infinite for fewer than
/// two entries.
pub fn min_adjacent_margin(v: &ComplexVector) -> f64 {
    let values = v.values();
    let mut min = f64::INFINITY;
    for pair in values.windows(2) {
        min = min.min(pair_margin(pair[0], pair[1]));
    }
    min
}

/// Smallest relative margin over the edges of a measurement graph.
pub fn min_edge_margin(v: &ComplexVector, g: &SimpleGraph) -> f64 {
    let mut min = f64::INFINITY;
    for (a, b) in g.edges() {
        min = min.min(pair_margin(v.get(a), v.get(b)));
    }
    min
}

/// The error a resampling loop reports when it exhausts [`MAX_TRIES`].
pub fn resampling_exhausted(what: &str) -> Error {
    Error::invalid(format!("could not sample {what} within {MAX_TRIES} attempts"))
}

/// A complex vector whose consecutive pairs all clear the margin floor.
pub fn noncollinear_vector(
    rng: &mut impl Rng,
    index_offset: i64,
    len: usize,
) -> Result<ComplexVector> {
    for _ in 0..MAX_TRIES {
        let v = random_vector(rng, index_offset, len);
        if v.len() < 2 || min_adjacent_margin(&v) > MARGIN_FLOOR {
            return Ok(v);
        }
    }
    Err(resampling_exhausted("a vector with non-collinear consecutive pairs"))
}
