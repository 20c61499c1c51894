//! Structured one-dimensional recovery schemes.
//!
//! These schemes measure a finite complex vector through its sample moduli
//! plus a sparse, structured set of difference moduli, and reconstruct the
//! vector up to one unimodular factor and conjugation:
//!
//! - **adjacent12** — differences to the next and next-but-one neighbor;
//!   recovery assembles each sample's phase by increments, with the
//!   two-step magnitudes deciding every sign.
//! - **two-reference** — differences from every sample to two fixed
//!   reference samples; recovery is a single closed-form sweep.
//! - **sign** — next-neighbor differences only, for real nonvanishing
//!   vectors; recovery propagates relative signs.
//!
//! The complex schemes finish with a Gauss–Newton pass over all measured
//! magnitudes at once, so the final accuracy is set by the conditioning of
//! the whole system rather than by the worst pair along the way.
//!
//! [`solve_triple`] settles the three-sample case from all pairwise
//! differences and is the primitive behind graph propagation.
//!
//! Every recovered representative is canonical: the seed sample is real
//! nonnegative and its partner carries a nonnegative imaginary part. The
//! accompanying [`RecoveryReport`] records the seed, conditioning, and the
//! worst re-measurement deviation.
//!
//! ## Example
//!
//! ```
//! use conjphase::recover::{recover_adjacent, StructuredSamples};
//! use conjphase::vector::{dist_conj, ComplexVector};
//! use num_complex::Complex64;
//!
//! let f = ComplexVector::new(0, vec![
//!     Complex64::new(1.0, 0.0),
//!     Complex64::new(0.0, 1.0),
//!     Complex64::new(-1.0, 0.0),
//! ]);
//! let data = StructuredSamples::measure_adjacent12(&f);
//! let (fhat, _report) = recover_adjacent(&data, conjphase::DEFAULT_TOL).unwrap();
//! let (d, _) = dist_conj(&fhat, &f);
//! assert!(d < 1e-12);
//! ```

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gauss_newton_step;
use crate::measure::{
    clamped_imag_sqrt, is_noncollinear, noncollinearity_margin, rel_real_inner,
};
use crate::vector::{ComplexVector, EquivalenceBranch};

/// Which structured measurement scheme produced a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Differences to offsets +1 and +2.
    Adjacent12,
    /// Differences to the two fixed reference indices `[k, l]`.
    TwoReference([i64; 2]),
    /// Next-neighbor differences of a real nonvanishing vector.
    Sign,
}

/// Phaseless data of one structured scheme over the index window
/// `[index_offset, index_offset + abs.len())`.
///
/// `abs[p]` is `|f_{offset+p}|`. The difference arrays depend on the scheme:
///
/// - adjacent12: `rel1[p] = |f_{offset+p+1} − f_{offset+p}|` (length n−1),
///   `rel2[p] = |f_{offset+p+2} − f_{offset+p}|` (length n−2);
/// - two-reference `[k, l]`: `rel1[p] = |f_{offset+p} − f_k|`,
///   `rel2[p] = |f_{offset+p} − f_l|` (both length n);
/// - sign: `rel1` as for adjacent12, `rel2` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredSamples {
    /// Scheme that produced (and can invert) this data.
    pub scheme: SchemeKind,
    /// Index of the first sample.
    pub index_offset: i64,
    /// Sample moduli.
    pub abs: Vec<f64>,
    /// First difference-modulus array (see type docs).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rel1: Vec<f64>,
    /// Second difference-modulus array (see type docs).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rel2: Vec<f64>,
}

impl StructuredSamples {
    /// Number of samples in the window.
    pub fn len(&self) -> usize {
        self.abs.len()
    }

    /// True when the window is empty.
    pub fn is_empty(&self) -> bool {
        self.abs.is_empty()
    }

    /// Measures `f` under the adjacent12 scheme.
    pub fn measure_adjacent12(f: &ComplexVector) -> Self {
        let v = f.values();
        let n = v.len();
        StructuredSamples {
            scheme: SchemeKind::Adjacent12,
            index_offset: f.index_offset(),
            abs: v.iter().map(|z| z.norm()).collect(),
            rel1: (0..n.saturating_sub(1)).map(|p| (v[p + 1] - v[p]).norm()).collect(),
            rel2: (0..n.saturating_sub(2)).map(|p| (v[p + 2] - v[p]).norm()).collect(),
        }
    }

    /// Measures `f` under the two-reference scheme with references `k < l`
    /// (absolute indices inside the window).
    pub fn measure_two_reference(f: &ComplexVector, k: i64, l: i64) -> Result<Self> {
        let s = StructuredSamples {
            scheme: SchemeKind::TwoReference([k, l]),
            index_offset: f.index_offset(),
            abs: f.values().iter().map(|z| z.norm()).collect(),
            rel1: f.values().iter().map(|z| (z - f.get(k)).norm()).collect(),
            rel2: f.values().iter().map(|z| (z - f.get(l)).norm()).collect(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Measures `f` under the sign scheme (sample moduli plus next-neighbor
    /// difference moduli).
    pub fn measure_signs(f: &ComplexVector) -> Self {
        let v = f.values();
        let n = v.len();
        StructuredSamples {
            scheme: SchemeKind::Sign,
            index_offset: f.index_offset(),
            abs: v.iter().map(|z| z.norm()).collect(),
            rel1: (0..n.saturating_sub(1)).map(|p| (v[p + 1] - v[p]).norm()).collect(),
            rel2: Vec::new(),
        }
    }

    /// Checks array shapes against the scheme and rejects non-finite or
    /// negative entries. Feasibility of individual magnitude triples is
    /// checked later, during recovery.
    pub fn validate(&self) -> Result<()> {
        for (name, arr) in [("abs", &self.abs), ("rel1", &self.rel1), ("rel2", &self.rel2)] {
            for (p, &v) in arr.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("{name}[{p}] = {v} is not a magnitude")));
                }
            }
        }
        let n = self.abs.len();
        let shape_err = |want: &str| {
            Err(Error::invalid(format!(
                "difference arrays have lengths ({}, {}) but the scheme needs {want} for {n} samples",
                self.rel1.len(),
                self.rel2.len()
            )))
        };
        match self.scheme {
            SchemeKind::Adjacent12 => {
                if self.rel1.len() != n.saturating_sub(1) || self.rel2.len() != n.saturating_sub(2)
                {
                    return shape_err("(n−1, n−2)");
                }
            }
            SchemeKind::TwoReference([k, l]) => {
                if self.rel1.len() != n || self.rel2.len() != n {
                    return shape_err("(n, n)");
                }
                if k == l {
                    return Err(Error::invalid(format!(
                        "reference indices must differ (both are {k})"
                    )));
                }
                let last = self.index_offset + n as i64 - 1;
                for r in [k, l] {
                    if r < self.index_offset || r > last {
                        return Err(Error::invalid(format!(
                            "reference index {r} outside the sample window [{}, {last}]",
                            self.index_offset
                        )));
                    }
                }
            }
            SchemeKind::Sign => {
                if self.rel1.len() != n.saturating_sub(1) || !self.rel2.is_empty() {
                    return shape_err("(n−1, 0)");
                }
            }
        }
        Ok(())
    }
}

/// Diagnostics attached to every recovery result.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Branch convention of the returned representative. Recovery pins the
    /// canonical seed, so this is the identity branch; comparisons against
    /// another vector may still land on either branch.
    pub branch: EquivalenceBranch,
    /// Worst absolute deviation when the output is measured again.
    pub residual: f64,
    /// Smallest pair determinant — the area `|f_a||f_b| sin ∠(f_a, f_b)`
    /// that conditions each propagation step — met during recovery (0 when
    /// nothing was propagated).
    pub min_determinant: f64,
    /// Human-readable remarks (canonicalization, degenerate windows, …).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Seed pair that pinned the global phase, if the scheme has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<(i64, i64)>,
    /// Triangle-graph node visit order (graph propagation only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bfs_order: Option<Vec<usize>>,
    /// Worst disagreement between independent recoveries of one vertex
    /// (graph propagation only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_revisit_discrepancy: Option<f64>,
    /// Worst deviation of the deconvolved coefficients' re-measurement
    /// (windowed schemes only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deconvolution_residual: Option<f64>,
    /// Smallest singular value of the deconvolution system (windowed
    /// schemes only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smallest_singular_value: Option<f64>,
}

impl RecoveryReport {
    /// A fresh report with identity branch and empty diagnostics.
    pub fn new() -> Self {
        Self::default()
    }
}

const CANONICAL_NOTE: &str =
    "canonical phase: seed sample is real-nonnegative, partner nonnegative-imaginary";

/// Relative margin of a pair for collinearity error reports.
fn relative_margin(mag_a: f64, mag_b: f64, diff: f64) -> f64 {
    let prod = mag_a * mag_b;
    if prod > 0.0 {
        noncollinearity_margin(mag_a, mag_b, diff) / prod
    } else {
        0.0
    }
}

/// Recovers three samples from all three moduli and all three pairwise
/// difference moduli (`rel` ordered as pairs (0,1), (0,2), (1,2)).
///
/// With at least one non-collinear pair the class is pinned by seeding on
/// the pair of largest margin and solving a 2×2 real system for the third
/// sample. All-collinear data has a real representative, reconstructed by
/// sign-splitting. Either way the result must reproduce all six magnitudes;
/// data no complex triple can produce is rejected.
pub fn solve_triple(abs: &[f64; 3], rel: &[f64; 3], tol: f64) -> Result<ComplexVector> {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let rho_index = |i: usize, j: usize| {
        let key = (i.min(j), i.max(j));
        PAIRS.iter().position(|&p| p == key).expect("pair of 0..3 indices")
    };

    let mut rho = [0.0_f64; 3];
    for (t, &(i, j)) in PAIRS.iter().enumerate() {
        rho[t] = rel_real_inner(abs[i], abs[j], rel[t], tol)?;
    }

    let mut best: Option<usize> = None;
    let mut best_margin = f64::NEG_INFINITY;
    for (t, &(i, j)) in PAIRS.iter().enumerate() {
        if is_noncollinear(abs[i], abs[j], rel[t], tol) {
            let margin = noncollinearity_margin(abs[i], abs[j], rel[t]);
            if margin > best_margin {
                best_margin = margin;
                best = Some(t);
            }
        }
    }

    let mut g = [Complex64::new(0.0, 0.0); 3];
    match best {
        Some(t) => {
            let (i, j) = PAIRS[t];
            let w = 3 - i - j;
            g[i] = Complex64::new(abs[i], 0.0);
            let re_j = rho[t] / abs[i];
            g[j] = Complex64::new(re_j, clamped_imag_sqrt(abs[j], re_j, tol)?);
            let rho_iw = rho[rho_index(i, w)];
            let rho_jw = rho[rho_index(j, w)];
            // Rows are the recovered seed pair; det = |f_i|·Im f_j > 0.
            let det = g[i].re * g[j].im - g[i].im * g[j].re;
            g[w] = Complex64::new(
                (rho_iw * g[j].im - rho_jw * g[i].im) / det,
                (g[i].re * rho_jw - g[j].re * rho_iw) / det,
            );
        }
        None => {
            // Every pair collinear: some real vector realizes the data.
            if let Some(p) = (0..3).find(|&p| abs[p] > 0.0) {
                g[p] = Complex64::new(abs[p], 0.0);
                for q in 0..3 {
                    if q != p && abs[q] > 0.0 {
                        let sign = if rho[rho_index(p, q)] < 0.0 { -1.0 } else { 1.0 };
                        g[q] = Complex64::new(sign * abs[q], 0.0);
                    }
                }
            }
        }
    }

    let scale = abs.iter().chain(rel).fold(1.0_f64, |acc, &v| acc.max(v));
    let mut worst = 0.0_f64;
    for p in 0..3 {
        worst = worst.max((g[p].norm() - abs[p]).abs());
    }
    for (t, &(i, j)) in PAIRS.iter().enumerate() {
        worst = worst.max(((g[i] - g[j]).norm() - rel[t]).abs());
    }
    if worst > tol * scale {
        return Err(Error::infeasible(format!(
            "no complex triple realizes these six magnitudes (deviation {worst:.3e})"
        )));
    }
    Ok(ComplexVector::new(0, g.to_vec()))
}

/// Recovers adjacent12 data with the canonical anchor at the window start.
pub fn recover_adjacent(
    s: &StructuredSamples,
    tol: f64,
) -> Result<(ComplexVector, RecoveryReport)> {
    recover_adjacent_anchored(s, s.index_offset, tol)
}

/// Recovers adjacent12 data, seeding at `anchor` (which needs a right
/// neighbor inside the window). Each adjacent pair's angle follows from the
/// polarization identity up to sign, the two-step magnitudes decide every
/// sign, and the phases assemble by increments away from the anchor before
/// a final fit against all magnitudes at once.
pub fn recover_adjacent_anchored(
    s: &StructuredSamples,
    anchor: i64,
    tol: f64,
) -> Result<(ComplexVector, RecoveryReport)> {
    if s.scheme != SchemeKind::Adjacent12 {
        return Err(Error::invalid("sample set was not measured by the adjacent12 scheme"));
    }
    s.validate()?;
    let n = s.abs.len();
    let offset = s.index_offset;
    let mut report = RecoveryReport::new();

    if n == 0 {
        report.notes.push("empty window: nothing to recover".into());
        return Ok((ComplexVector::empty(), report));
    }
    if n == 1 {
        report.notes.push("single sample: its modulus already fixes the class".into());
        return Ok((ComplexVector::new(offset, vec![Complex64::new(s.abs[0], 0.0)]), report));
    }
    let last = offset + n as i64 - 1;
    if anchor < offset || anchor >= last {
        return Err(Error::invalid(format!(
            "anchor {anchor} must lie in [{offset}, {}] so the seed pair fits the window",
            last - 1
        )));
    }
    let a = (anchor - offset) as usize;

    // Every adjacent pair contributes the angle δ_q between consecutive
    // samples, known up to sign from the polarization identity. Feasibility
    // is judged before collinearity — a triple no complex pair realizes
    // must not read as merely collinear — and a collinear pair leaves its
    // sign undetermined, so it is refused.
    let mut delta = vec![0.0_f64; n - 1];
    let mut min_det = f64::INFINITY;
    for (q, angle) in delta.iter_mut().enumerate() {
        let (mq, mr, d) = (s.abs[q], s.abs[q + 1], s.rel1[q]);
        let rho = rel_real_inner(mq, mr, d, tol)?;
        if !is_noncollinear(mq, mr, d, tol) {
            return Err(Error::AdjacentCollinear {
                n: offset + q as i64,
                margin: relative_margin(mq, mr, d),
            });
        }
        *angle = (rho / (mq * mr)).clamp(-1.0, 1.0).acos();
        min_det = min_det.min(mq * mr * angle.sin());
    }

    // The two-step magnitudes decide each sign relative to the previous
    // pair: cos(δ₁ + δ₂) and cos(δ₁ − δ₂) are separated by 2 sin δ₁ sin δ₂,
    // a gap the non-collinearity margins keep far above the data accuracy.
    // Phases then assemble by increments from the anchor, so rounding
    // errors stay additive along the window — a value recursion would
    // multiply them through every badly conditioned pair instead.
    let two_step_cosine = |p: usize| -> Result<f64> {
        let rho = rel_real_inner(s.abs[p], s.abs[p + 2], s.rel2[p], tol)?;
        Ok((rho / (s.abs[p] * s.abs[p + 2])).clamp(-1.0, 1.0))
    };
    let pick = |c2: f64, d1: f64, d2: f64| -> f64 {
        let same = (d1 + d2).cos();
        let flip = (d1 - d2).cos();
        if (c2 - same).abs() <= (c2 - flip).abs() {
            1.0
        } else {
            -1.0
        }
    };
    let mut sign = vec![0.0_f64; n - 1];
    // The anchor is real and its partner sits in the upper half-plane.
    sign[a] = 1.0;
    for p in a + 1..n - 1 {
        sign[p] = pick(two_step_cosine(p - 1)?, delta[p - 1], delta[p]) * sign[p - 1];
    }
    for p in (0..a).rev() {
        sign[p] = pick(two_step_cosine(p)?, delta[p + 1], delta[p]) * sign[p + 1];
    }
    let mut phi = vec![0.0_f64; n];
    for p in a + 1..n {
        phi[p] = phi[p - 1] + sign[p - 1] * delta[p - 1];
    }
    for p in (0..a).rev() {
        phi[p] = phi[p + 1] - sign[p] * delta[p];
    }
    let g: Vec<Complex64> = (0..n).map(|p| Complex64::from_polar(s.abs[p], phi[p])).collect();

    let ghat = polish(&ComplexVector::new(offset, g), &MagnitudeSystem::from_structured(s, anchor), 6);
    report.residual = structured_residual(&ghat, s);
    report.min_determinant = min_det;
    report.seed = Some((anchor, anchor + 1));
    report.notes.push(CANONICAL_NOTE.into());
    Ok((ghat, report))
}

/// Recovers two-reference data: the lower reference becomes real, the upper
/// reference follows from the polarization identity, and every other sample
/// drops out of two scalar equations sharing one fixed determinant.
pub fn recover_two_reference(
    s: &StructuredSamples,
    tol: f64,
) -> Result<(ComplexVector, RecoveryReport)> {
    let SchemeKind::TwoReference([k, l]) = s.scheme else {
        return Err(Error::invalid("sample set was not measured by the two-reference scheme"));
    };
    s.validate()?;
    let n = s.abs.len();
    let offset = s.index_offset;
    let ik = (k - offset) as usize;
    let il = (l - offset) as usize;
    let (mk, ml) = (s.abs[ik], s.abs[il]);
    let dkl = s.rel2[ik];

    // Feasibility before collinearity: an unrealizable reference triple is
    // infeasible data, not a collinear reference pair.
    let rho_kl = rel_real_inner(mk, ml, dkl, tol)?;
    if !is_noncollinear(mk, ml, dkl, tol) {
        return Err(Error::ReferenceCollinear { k, l, margin: relative_margin(mk, ml, dkl) });
    }
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    g[ik] = Complex64::new(mk, 0.0);
    let re_l = rho_kl / mk;
    g[il] = Complex64::new(re_l, clamped_imag_sqrt(ml, re_l, tol)?);
    // Both reference equations share the same system; Im f_l > 0 by the
    // collinearity guard.
    let det = mk * g[il].im;

    for p in 0..n {
        if p == ik || p == il {
            continue;
        }
        let rho_pk = rel_real_inner(s.abs[p], mk, s.rel1[p], tol)?;
        let rho_pl = rel_real_inner(s.abs[p], ml, s.rel2[p], tol)?;
        let re = rho_pk / mk;
        let im = (rho_pl - re * g[il].re) / g[il].im;
        g[p] = Complex64::new(re, im);
    }

    let ghat = polish(&ComplexVector::new(offset, g), &MagnitudeSystem::from_structured(s, k), 6);
    let mut report = RecoveryReport::new();
    report.residual = structured_residual(&ghat, s);
    report.min_determinant = det;
    report.seed = Some((k, l));
    report.notes.push(CANONICAL_NOTE.into());
    Ok((ghat, report))
}

/// Recovers a real nonvanishing vector from sample moduli and next-neighbor
/// difference moduli by propagating relative signs; the first sample is
/// taken positive. Any vanishing sample (relative to the largest) breaks
/// the sign chain and is refused.
pub fn recover_signs(
    s: &StructuredSamples,
    tol: f64,
) -> Result<(ComplexVector, RecoveryReport)> {
    if s.scheme != SchemeKind::Sign {
        return Err(Error::invalid("sample set was not measured by the sign scheme"));
    }
    s.validate()?;
    let n = s.abs.len();
    let offset = s.index_offset;
    let mut report = RecoveryReport::new();
    if n == 0 {
        report.notes.push("empty window: nothing to recover".into());
        return Ok((ComplexVector::empty(), report));
    }

    let scale = s.abs.iter().fold(0.0_f64, |acc, &v| acc.max(v));
    if scale == 0.0 {
        return Err(Error::ZeroSample(offset));
    }
    for (p, &v) in s.abs.iter().enumerate() {
        if v <= tol * scale {
            return Err(Error::ZeroSample(offset + p as i64));
        }
    }

    let mut values = vec![0.0_f64; n];
    values[0] = s.abs[0];
    let mut min_product = f64::INFINITY;
    for p in 0..n - 1 {
        let rho = rel_real_inner(s.abs[p], s.abs[p + 1], s.rel1[p], tol)?;
        min_product = min_product.min(rho.abs());
        let flip = if rho < 0.0 { -1.0 } else { 1.0 };
        values[p + 1] = values[p].signum() * flip * s.abs[p + 1];
    }
    let ghat = ComplexVector::from_reals(offset, &values);
    report.residual = structured_residual(&ghat, s);
    report.min_determinant = if min_product.is_finite() { min_product } else { 0.0 };
    report.notes.push("canonical sign: first sample positive".into());
    Ok((ghat, report))
}

/// Worst absolute deviation between `s` and the re-measured candidate.
fn structured_residual(ghat: &ComplexVector, s: &StructuredSamples) -> f64 {
    let v = ghat.values();
    let mut worst = 0.0_f64;
    for (p, z) in v.iter().enumerate() {
        worst = worst.max((z.norm() - s.abs[p]).abs());
    }
    match s.scheme {
        SchemeKind::Adjacent12 | SchemeKind::Sign => {
            for (p, &r) in s.rel1.iter().enumerate() {
                worst = worst.max(((v[p + 1] - v[p]).norm() - r).abs());
            }
            for (p, &r) in s.rel2.iter().enumerate() {
                worst = worst.max(((v[p + 2] - v[p]).norm() - r).abs());
            }
        }
        SchemeKind::TwoReference([k, l]) => {
            for (p, &r) in s.rel1.iter().enumerate() {
                worst = worst.max(((v[p] - ghat.get(k)).norm() - r).abs());
            }
            for (p, &r) in s.rel2.iter().enumerate() {
                worst = worst.max(((v[p] - ghat.get(l)).norm() - r).abs());
            }
        }
    }
    worst
}

/// Every magnitude target a recovered representative must reproduce: sample
/// moduli `|g_n|`, pair moduli `|g_n − g_m|`, and the gauge index whose
/// imaginary part is pinned at zero to fix the free global phase.
pub(crate) struct MagnitudeSystem {
    abs: Vec<(i64, f64)>,
    rel: Vec<(i64, i64, f64)>,
    gauge: i64,
}

impl MagnitudeSystem {
    /// Assembles a system from explicit target lists.
    pub(crate) fn new(abs: Vec<(i64, f64)>, rel: Vec<(i64, i64, f64)>, gauge: i64) -> Self {
        MagnitudeSystem { abs, rel, gauge }
    }

    /// Collects the targets of a structured sample set, gauged at `gauge`.
    pub(crate) fn from_structured(s: &StructuredSamples, gauge: i64) -> Self {
        let offset = s.index_offset;
        let abs =
            s.abs.iter().enumerate().map(|(p, &t)| (offset + p as i64, t)).collect::<Vec<_>>();
        let mut rel = Vec::with_capacity(s.rel1.len() + s.rel2.len());
        match s.scheme {
            SchemeKind::Adjacent12 | SchemeKind::Sign => {
                for (p, &t) in s.rel1.iter().enumerate() {
                    let n = offset + p as i64;
                    rel.push((n, n + 1, t));
                }
                for (p, &t) in s.rel2.iter().enumerate() {
                    let n = offset + p as i64;
                    rel.push((n, n + 2, t));
                }
            }
            SchemeKind::TwoReference([k, l]) => {
                // Self-differences |f_k − f_k| and |f_l − f_l| carry no
                // information and would add all-zero rows.
                for (p, &t) in s.rel1.iter().enumerate() {
                    let n = offset + p as i64;
                    if n != k {
                        rel.push((n, k, t));
                    }
                }
                for (p, &t) in s.rel2.iter().enumerate() {
                    let n = offset + p as i64;
                    if n != l {
                        rel.push((n, l, t));
                    }
                }
            }
        }
        MagnitudeSystem { abs, rel, gauge }
    }
}

/// Refines a recovered representative by Gauss–Newton on its phases.
///
/// The sequential recursions keep every *step* accurate, but one badly
/// conditioned pair mid-chain amplifies the rounding error of everything
/// solved after it. Re-fitting against all targets at once contracts that
/// error back to the conditioning of the whole overdetermined system.
///
/// Sample moduli are data, so they are imposed exactly: each entry is
/// rewritten as `m·exp(iφ)` and only the phases move, driven by the pair
/// targets `cos(φ_a − φ_b) = ρ_ab/(m_a m_b)`. Fitting phases rather than
/// rectangular parts matters — the rectangular least-squares problem has
/// spurious near-solutions (an entry mirrored across the line through its
/// neighbors keeps every difference and almost keeps its modulus), and an
/// ill-conditioned step can jump to one. With moduli pinned those mirrors
/// are infeasible, and the remaining branch-flip ambiguities sit behind
/// residual barriers far above the starting residual, so accepting only
/// residual-decreasing steps keeps the iteration in the true basin.
///
/// The gauge entry's phase is frozen so the input's phase convention
/// survives; the result is never worse than the phase projection of the
/// input.
pub(crate) fn polish(g0: &ComplexVector, sys: &MagnitudeSystem, max_steps: usize) -> ComplexVector {
    let span = g0.logical_range();
    if span.is_empty() || sys.abs.is_empty() {
        return g0.clone();
    }
    let offset = span.start;
    let mut values = g0.values().to_vec();

    let moduli: BTreeMap<i64, f64> = sys.abs.iter().copied().collect();
    // Unknowns: one phase per measured entry of nonzero modulus, minus the
    // frozen gauge phase. Zero-modulus entries have no phase to fit, and
    // unmeasured gap entries of a sparse vertex set stay untouched.
    let mut slots: BTreeMap<i64, usize> = BTreeMap::new();
    for (&index, &m) in &moduli {
        if m > 0.0 && index != sys.gauge {
            let next = slots.len();
            slots.insert(index, next);
        }
    }
    if moduli.get(&sys.gauge).copied().unwrap_or(0.0) <= 0.0 {
        return g0.clone();
    }
    let cols = slots.len();
    if cols == 0 {
        return g0.clone();
    }

    // Pair rows in squared-difference units: |g_a − g_b|² = d² becomes
    //   m_a m_b (cos(φ_a − φ_b) − c_ab) = 0,  c_ab = ρ_ab / (m_a m_b).
    struct PairRow {
        a: i64,
        b: i64,
        weight: f64,
        cosine: f64,
    }
    let mut pairs = Vec::with_capacity(sys.rel.len());
    for &(a, b, target) in &sys.rel {
        let (Some(&ma), Some(&mb)) = (moduli.get(&a), moduli.get(&b)) else { continue };
        if ma <= 0.0 || mb <= 0.0 {
            continue;
        }
        let weight = ma * mb;
        let cosine = ((ma * ma + mb * mb - target * target) / (2.0 * weight)).clamp(-1.0, 1.0);
        pairs.push(PairRow { a, b, weight, cosine });
    }
    if pairs.len() < cols {
        return g0.clone();
    }

    let mut phases: BTreeMap<i64, f64> = moduli
        .iter()
        .filter(|&(_, &m)| m > 0.0)
        .map(|(&index, _)| (index, values[(index - offset) as usize].arg()))
        .collect();
    let residual = |phi: &BTreeMap<i64, f64>| -> DVector<f64> {
        let mut r = DVector::zeros(pairs.len());
        for (q, row) in pairs.iter().enumerate() {
            r[q] = row.weight * ((phi[&row.a] - phi[&row.b]).cos() - row.cosine);
        }
        r
    };

    let scale = moduli.values().fold(0.0_f64, |acc, &m| acc.max(m));
    let floor = 64.0 * f64::EPSILON * scale * scale;
    let mut r = residual(&phases);
    for _ in 0..max_steps {
        if r.amax() <= floor {
            break;
        }
        let mut j = DMatrix::zeros(pairs.len(), cols);
        for (q, row) in pairs.iter().enumerate() {
            let slope = -row.weight * (phases[&row.a] - phases[&row.b]).sin();
            if let Some(&c) = slots.get(&row.a) {
                j[(q, c)] += slope;
            }
            if let Some(&c) = slots.get(&row.b) {
                j[(q, c)] -= slope;
            }
        }
        let Some(delta) = gauss_newton_step(&j, &r) else { break };
        // Backtrack on overshoot: a halved step still points downhill.
        let mut improved = false;
        for shrink in [1.0, 0.5, 0.25] {
            let mut next = phases.clone();
            for (&index, &c) in &slots {
                *next.get_mut(&index).expect("slot phases exist") += shrink * delta[c];
            }
            let r_next = residual(&next);
            if r_next.norm() < r.norm() {
                phases = next;
                r = r_next;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    for (&index, &phase) in &phases {
        values[(index - offset) as usize] = Complex64::from_polar(moduli[&index], phase);
    }
    // Measured-but-vanishing entries are exactly zero.
    for (&index, &m) in &moduli {
        if m <= 0.0 {
            values[(index - offset) as usize] = Complex64::new(0.0, 0.0);
        }
    }
    ComplexVector::new(offset, values)
}
