//! Complex vectors with logical indexing and the conjugate-phase metric.
//!
//! Signals live on a window of integer indices `[offset, offset + len)` and
//! are implicitly zero outside it, so vectors with different windows compare
//! cleanly. The metric of interest is not the plain Euclidean distance but
//! the distance between *equivalence classes*: two vectors are identified
//! when one is a unimodular multiple of the other or of its conjugate,
//! because no magnitude measurement can tell those apart.
//!
//! ## Example
//!
//! ```
//! use conjphase::vector::{ComplexVector, dist_conj, BranchKind};
//! use num_complex::Complex64;
//!
//! let f = ComplexVector::new(0, vec![Complex64::ONE, Complex64::I]);
//! let rotated = f.scaled(Complex64::from_polar(1.0, 1.2));
//! // The reported phase maps the second vector onto the first.
//! let (d, branch) = dist_conj(&rotated, &f);
//! assert!(d < 1e-12);
//! assert_eq!(branch.kind, BranchKind::Identity);
//! assert!((branch.phase - 1.2).abs() < 1e-12);
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A finite complex vector on a logical index window.
///
/// Index `n` is *logical*: entry `n` is stored at `n - index_offset`, and
/// every logical index outside the window reads as zero. All stored values
/// are finite; constructors enforce this.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    index_offset: i64,
    values: Vec<Complex64>,
}

impl ComplexVector {
    /// Builds a vector whose first entry sits at logical index `index_offset`.
    ///
    /// Panics if any entry is non-finite; phaseless data never produces NaN
    /// or infinity, so a non-finite entry is a programming error.
    pub fn new(index_offset: i64, values: Vec<Complex64>) -> Self {
        assert!(
            values.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "complex vector entries must be finite"
        );
        ComplexVector { index_offset, values }
    }

    /// Builds a vector from real entries (imaginary parts zero).
    pub fn from_reals(index_offset: i64, values: &[f64]) -> Self {
        Self::new(
            index_offset,
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// The empty vector (zero everywhere).
    pub fn empty() -> Self {
        ComplexVector { index_offset: 0, values: Vec::new() }
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when no entries are stored.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Logical index of the first stored entry.
    pub fn index_offset(&self) -> i64 {
        self.index_offset
    }

    /// Half-open logical index range `[offset, offset + len)`.
    pub fn logical_range(&self) -> std::ops::Range<i64> {
        self.index_offset..self.index_offset + self.values.len() as i64
    }

    /// Entry at logical index `n`; zero outside the stored window.
    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.index_offset {
            return Complex64::ZERO;
        }
        match usize::try_from(n - self.index_offset) {
            Ok(k) if k < self.values.len() => self.values[k],
            _ => Complex64::ZERO,
        }
    }

    /// The stored entries in index order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Iterates `(logical index, value)` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &z)| (self.index_offset + k as i64, z))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexVector {
            index_offset: self.index_offset,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    /// The vector scaled by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        ComplexVector::new(
            self.index_offset,
            self.values.iter().map(|&z| z * factor).collect(),
        )
    }

    /// Drops exactly-zero margins so the window hugs the support.
    /// The zero vector trims to the empty vector.
    pub fn support_trimmed(&self) -> Self {
        let nonzero = |z: &Complex64| z.re != 0.0 || z.im != 0.0;
        let Some(first) = self.values.iter().position(nonzero) else {
            return Self::empty();
        };
        let last = self.values.iter().rposition(nonzero).expect("nonzero entry exists");
        ComplexVector {
            index_offset: self.index_offset + first as i64,
            values: self.values[first..=last].to_vec(),
        }
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

/// Which pairing wins when comparing equivalence classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    /// `b` itself is the closest representative.
    #[default]
    Identity,
    /// The conjugate of `b` is strictly closer.
    Conjugation,
}

/// The optimal alignment found by [`dist_conj`]: a branch (identity or
/// conjugation) together with the unimodular phase `e^{iφ}` that best maps
/// the second vector onto the first.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EquivalenceBranch {
    /// Winning pairing; ties go to `Identity`.
    pub kind: BranchKind,
    /// Aligning phase in `[0, 2π)`; zero whenever the inner product vanishes.
    pub phase: f64,
}

impl EquivalenceBranch {
    /// The trivial alignment: identity branch, zero phase.
    pub fn identity() -> Self {
        EquivalenceBranch { kind: BranchKind::Identity, phase: 0.0 }
    }
}

/// Hermitian inner product `Σ a_n · conj(b_n)` over the union of supports.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    // Only the overlap of the stored windows contributes.
    let lo = a.index_offset.max(b.index_offset);
    let hi = (a.index_offset + a.len() as i64).min(b.index_offset + b.len() as i64);
    let mut acc = Complex64::ZERO;
    let mut n = lo;
    while n < hi {
        acc += a.get(n) * b.get(n).conj();
        n += 1;
    }
    acc
}

/// Distance between `a` and the orbit `{e^{iφ} b}`: algebraically
/// `sqrt(‖a‖² + ‖b‖² − 2|⟨a, b⟩|)`, evaluated by rotating `b` through its
/// aligning phase and measuring the leftover entrywise. The rotated form is
/// the same quantity but stays accurate when the orbits nearly coincide,
/// where the closed form drowns in cancellation around `√ε·‖a‖`.
pub fn dist_unimodular(a: &ComplexVector, b: &ComplexVector) -> f64 {
    aligned_gap(a, b).0
}

/// Optimal rotation of `b` onto `a` and the leftover `‖a − e^{iφ}b‖` at it.
fn aligned_gap(a: &ComplexVector, b: &ComplexVector) -> (f64, f64) {
    let phase = wrap_phase(inner(a, b));
    if a.is_empty() && b.is_empty() {
        return (0.0, phase);
    }
    let ar = a.logical_range();
    let br = b.logical_range();
    let rot = Complex64::from_polar(1.0, phase);
    let mut sum = 0.0;
    for n in ar.start.min(br.start)..ar.end.max(br.end) {
        sum += (a.get(n) - rot * b.get(n)).norm_sqr();
    }
    (sum.sqrt(), phase)
}

/// Distance between the equivalence classes of `a` and `b` under a global
/// unimodular factor *and* conjugation, together with the winning alignment.
///
/// Ties (equal distances for both pairings, e.g. real vectors) resolve to
/// the identity branch. The reported phase is `arg⟨a, b'⟩ ∈ [0, 2π)` for the
/// winning pairing `b'`, so `a ≈ e^{i·phase}·b'` at distance zero.
pub fn dist_conj(a: &ComplexVector, b: &ComplexVector) -> (f64, EquivalenceBranch) {
    let (d_id, phase_id) = aligned_gap(a, b);
    let (d_conj, phase_conj) = aligned_gap(a, &b.conj());
    if d_conj < d_id {
        (d_conj, EquivalenceBranch { kind: BranchKind::Conjugation, phase: phase_conj })
    } else {
        (d_id, EquivalenceBranch { kind: BranchKind::Identity, phase: phase_id })
    }
}

/// Argument of `z` mapped into `[0, 2π)`, with `arg 0 = 0`.
fn wrap_phase(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}
