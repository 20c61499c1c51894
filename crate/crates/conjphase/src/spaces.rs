//! Band-limited and shift-invariant signal models.
//!
//! Two continuous-time families share the finite-window measurement schemes:
//!
//! - [`PwSignal`] — band-limited interpolants `f(x) = Σ cₙ·sinc(2B(x−x₀)−n)`,
//!   whose coefficients are the samples on the critical grid `x₀ + n/(2B)`;
//! - [`SiSignal`] — shift-invariant expansions `f(x) = Σ cₙ·φ(x−n)` over a
//!   compactly supported real generator (hat or higher-order B-spline).
//!
//! Sampling a signal on the right grid turns either family into a finite
//! complex vector, so the structured recovery schemes apply verbatim; the
//! helpers here wrap measurement grids, coefficient fitting, and the
//! magnitude-interpolation diagnostic. [`counterexample_pair`] exhibits two
//! hat-generated signals with identical pointwise magnitude that are *not*
//! equivalent up to a unimodular factor and conjugation — the reason the
//! schemes insist on difference magnitudes as well.
//!
//! ## Example
//!
//! ```
//! use conjphase::spaces::counterexample_pair;
//! use conjphase::vector::dist_conj;
//!
//! let (f, g) = counterexample_pair();
//! let x = 1.317;
//! assert!((f.eval(x).norm() - g.eval(x).norm()).abs() < 1e-15);
//! let (d, _) = dist_conj(f.coeffs(), g.coeffs());
//! assert!((d - 2.0).abs() < 1e-12); // same magnitudes, different classes
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_least_squares;
use crate::recover::{recover_adjacent, recover_two_reference, RecoveryReport, StructuredSamples};
use crate::vector::ComplexVector;

/// Normalized cardinal sine `sin(πt)/(πt)`, continuously extended at zero.
pub fn sinc(t: f64) -> f64 {
    let a = std::f64::consts::PI * t;
    if a.abs() < 1e-8 {
        1.0 - a * a / 6.0
    } else {
        a.sin() / a
    }
}

/// Band-limited signal `f(x) = Σ cₙ·sinc(2B(x−x₀)−n)` with band `[−B, B]`.
///
/// The coefficients are exactly the samples on the critical grid
/// `x₀ + n/(2B)`, indexed by the coefficient vector's window.
#[derive(Debug, Clone, PartialEq)]
pub struct PwSignal {
    bandwidth: f64,
    x0: f64,
    coeffs: ComplexVector,
}

impl PwSignal {
    /// Wraps a coefficient window; the bandwidth must be positive and the
    /// grid origin finite.
    pub fn new(bandwidth: f64, x0: f64, coeffs: ComplexVector) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid(format!("bandwidth {bandwidth} must be positive")));
        }
        if !x0.is_finite() {
            return Err(Error::invalid(format!("grid origin {x0} must be finite")));
        }
        Ok(PwSignal { bandwidth, x0, coeffs })
    }

    /// Band parameter `B`.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Grid origin `x₀`.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Coefficients, i.e. the samples on the critical grid.
    pub fn coeffs(&self) -> &ComplexVector {
        &self.coeffs
    }

    /// Critical grid spacing `1/(2B)`.
    pub fn grid_spacing(&self) -> f64 {
        1.0 / (2.0 * self.bandwidth)
    }

    /// Location of grid node `n`.
    pub fn grid_point(&self, n: i64) -> f64 {
        self.x0 + n as f64 * self.grid_spacing()
    }

    /// Evaluates the interpolant at `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let u = 2.0 * self.bandwidth * (x - self.x0);
        self.coeffs
            .iter()
            .map(|(n, c)| c * sinc(u - n as f64))
            .sum()
    }
}

/// Outcome of [`pw_magnitude_interp_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationCheck {
    /// Worst deviation between interpolated and direct `|f|²` on the grid.
    pub max_deviation: f64,
    /// Largest direct `|f(x)|²` seen, for relative thresholds.
    pub peak: f64,
}

/// Checks that squared magnitudes sampled at *double* rate reconstruct
/// `|f|²` everywhere: `|f|²` is band-limited to `[−2B, 2B]`, so its samples
/// on the `1/(4B)` grid — extended `guard` nodes past the coefficient
/// window to tame truncation — interpolate it. Returns the worst deviation
/// over the coefficient span, stepped by `eval_step` in `x` units.
pub fn pw_magnitude_interp_check(s: &PwSignal, eval_step: f64, guard: u32) -> InterpolationCheck {
    assert!(eval_step > 0.0, "evaluation step must be positive");
    let coeffs = s.coeffs();
    if coeffs.is_empty() {
        return InterpolationCheck { max_deviation: 0.0, peak: 0.0 };
    }
    let span = coeffs.logical_range();
    let (lo, hi) = (span.start, span.end - 1);
    let guard = guard as i64;
    let fine_spacing = s.grid_spacing() / 2.0;
    let j_lo = 2 * lo - guard;
    let j_hi = 2 * hi + guard;
    let mag_sq: Vec<f64> = (j_lo..=j_hi)
        .map(|j| s.eval(s.x0 + j as f64 * fine_spacing).norm_sqr())
        .collect();

    let x_lo = s.grid_point(lo);
    let x_hi = s.grid_point(hi);
    let steps = ((x_hi - x_lo) / eval_step).ceil() as i64;
    let mut worst = 0.0_f64;
    let mut peak = 0.0_f64;
    for t in 0..=steps {
        let x = (x_lo + t as f64 * eval_step).min(x_hi);
        let u = (x - s.x0) / fine_spacing;
        let interpolated: f64 = mag_sq
            .iter()
            .enumerate()
            .map(|(p, q)| q * sinc(u - (j_lo + p as i64) as f64))
            .sum();
        let direct = s.eval(x).norm_sqr();
        worst = worst.max((interpolated - direct).abs());
        peak = peak.max(direct);
    }
    InterpolationCheck { max_deviation: worst, peak }
}

/// Recovers a band-limited signal from adjacent12 data on its critical
/// grid: the recovered samples are the coefficients.
pub fn pw_recover_adjacent(
    data: &StructuredSamples,
    bandwidth: f64,
    x0: f64,
    tol: f64,
) -> Result<(PwSignal, RecoveryReport)> {
    let (samples, report) = recover_adjacent(data, tol)?;
    Ok((PwSignal::new(bandwidth, x0, samples)?, report))
}

/// Real compactly supported generator of a shift-invariant space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// Piecewise-linear hat `max(1 − |x − 1|, 0)`, supported on `(0, 2)`.
    Hat,
    /// Cardinal B-spline of the given order, supported on `(0, order + 1)`;
    /// order 1 coincides with the hat.
    BSpline(u32),
}

fn bspline(order: u32, x: f64) -> f64 {
    if order == 0 {
        return if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
    }
    let m = order as f64;
    (x / m) * bspline(order - 1, x) + ((m + 1.0 - x) / m) * bspline(order - 1, x - 1.0)
}

impl Generator {
    /// Evaluates the generator at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Generator::Hat => (1.0 - (x - 1.0).abs()).max(0.0),
            Generator::BSpline(order) => bspline(order, x),
        }
    }

    /// Open support interval.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Generator::Hat => (0.0, 2.0),
            Generator::BSpline(order) => (0.0, order as f64 + 1.0),
        }
    }
}

/// Shift-invariant signal `f(x) = Σ cₙ·φ(x − n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiSignal {
    generator: Generator,
    coeffs: ComplexVector,
}

impl SiSignal {
    /// Wraps a coefficient window over the generator's integer shifts.
    pub fn new(generator: Generator, coeffs: ComplexVector) -> Self {
        SiSignal { generator, coeffs }
    }

    /// The generator.
    pub fn generator(&self) -> Generator {
        self.generator
    }

    /// Shift coefficients.
    pub fn coeffs(&self) -> &ComplexVector {
        &self.coeffs
    }

    /// Evaluates the expansion at `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(n, c)| c * self.generator.eval(x - n as f64))
            .sum()
    }
}

/// Two hat-generated signals with *identical* pointwise magnitude whose
/// coefficient windows are not equivalent up to a unimodular factor and
/// conjugation: phaseless pointwise data alone cannot separate them.
pub fn counterexample_pair() -> (SiSignal, SiSignal) {
    let f = SiSignal::new(
        Generator::Hat,
        ComplexVector::new(
            0,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
        ),
    );
    let g = SiSignal::new(
        Generator::Hat,
        ComplexVector::new(
            0,
            vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
        ),
    );
    (f, g)
}

/// Half-integer sample ids strictly inside the support of a signal with the
/// given generator and coefficient window: id `j` stands for the point
/// `j/2`.
pub fn si_half_integer_ids(generator: Generator, coeff_lo: i64, coeff_hi: i64) -> (i64, i64) {
    let (_, sup_hi) = generator.support();
    // Support of the expansion is (coeff_lo, coeff_hi + sup_hi); half-integer
    // points strictly inside keep every sample potentially nonzero.
    (2 * coeff_lo + 1, 2 * coeff_hi + (2.0 * sup_hi).round() as i64 - 1)
}

/// Samples a shift-invariant signal on the half-integer grid inside its
/// support; the returned vector is indexed by sample id `j` (point `j/2`).
pub fn si_sample_half_integer(s: &SiSignal) -> ComplexVector {
    if s.coeffs().is_empty() {
        return ComplexVector::empty();
    }
    let span = s.coeffs().logical_range();
    let (j_lo, j_hi) = si_half_integer_ids(s.generator(), span.start, span.end - 1);
    let values = (j_lo..=j_hi).map(|j| s.eval(j as f64 / 2.0)).collect();
    ComplexVector::new(j_lo, values)
}

/// Fits shift coefficients on the window `[coeff_lo, coeff_lo + coeff_len)`
/// to half-integer samples (indexed by id `j` ↔ point `j/2`) by least
/// squares. Returns the fitted signal, the fit residual, and the smallest
/// singular value of the sampling matrix.
pub fn fit_si_coefficients(
    samples: &ComplexVector,
    generator: Generator,
    coeff_lo: i64,
    coeff_len: usize,
    tol: f64,
) -> Result<(SiSignal, f64, f64)> {
    if coeff_len == 0 {
        return Err(Error::invalid("coefficient window must not be empty"));
    }
    if samples.len() < coeff_len {
        return Err(Error::invalid(format!(
            "{} samples cannot determine {coeff_len} coefficients",
            samples.len()
        )));
    }
    let rows = samples.len();
    let mut a = nalgebra::DMatrix::zeros(rows, coeff_len);
    for (r, (j, _)) in samples.iter().enumerate() {
        for c in 0..coeff_len {
            let n = coeff_lo + c as i64;
            a[(r, c)] = generator.eval(j as f64 / 2.0 - n as f64);
        }
    }
    let re: Vec<f64> = samples.values().iter().map(|z| z.re).collect();
    let im: Vec<f64> = samples.values().iter().map(|z| z.im).collect();
    let sol_re = solve_least_squares(&a, &re, tol, "shift-coefficient fit")?;
    let sol_im = solve_least_squares(&a, &im, tol, "shift-coefficient fit")?;
    let coeffs = ComplexVector::new(
        coeff_lo,
        sol_re
            .solution
            .iter()
            .zip(&sol_im.solution)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect(),
    );
    let residual = sol_re.residual.hypot(sol_im.residual);
    Ok((SiSignal::new(generator, coeffs), residual, sol_re.sigma_min))
}

/// Recovers a shift-invariant signal from two-reference data over its
/// half-integer samples, then refits the coefficient window. The fit matrix
/// is real, so the refit respects the unimodular-and-conjugation class.
pub fn si_recover_two_reference(
    data: &StructuredSamples,
    generator: Generator,
    coeff_lo: i64,
    coeff_len: usize,
    tol: f64,
) -> Result<(SiSignal, RecoveryReport)> {
    let (samples, mut report) = recover_two_reference(data, tol)?;
    let (signal, fit_residual, sigma_min) =
        fit_si_coefficients(&samples, generator, coeff_lo, coeff_len, tol)?;
    report.deconvolution_residual = Some(fit_residual);
    report.smallest_singular_value = Some(sigma_min);
    Ok((signal, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recover::StructuredSamples;
    use crate::vector::dist_conj;
    use crate::DEFAULT_TOL;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sinc_values_and_small_argument_continuity() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(1.0).abs() < 1e-15);
        assert!(sinc(2.0).abs() < 1e-15);
        assert!((sinc(0.5) - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        // The series branch continues the ratio smoothly across its cutoff.
        assert!((sinc(3e-9) - 1.0).abs() < 1e-16);
        assert!((sinc(4e-9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pw_interpolates_its_own_grid() {
        let coeffs = ComplexVector::new(
            -1,
            vec![cx(0.4, -0.2), cx(-1.1, 0.7), cx(0.3, 0.9), cx(0.8, -0.5)],
        );
        let s = PwSignal::new(0.5, 0.25, coeffs.clone()).unwrap();
        for (n, c) in coeffs.iter() {
            assert!((s.eval(s.grid_point(n)) - c).norm() < 1e-12);
        }
        // Off-grid value by hand at the midpoint between nodes 0 and 1.
        let two = PwSignal::new(
            0.5,
            0.0,
            ComplexVector::new(0, vec![cx(1.0, 0.0), cx(0.0, 1.0)]),
        )
        .unwrap();
        let got = two.eval(0.5);
        let want = cx(1.0, 1.0) * (2.0 / std::f64::consts::PI);
        assert!((got - want).norm() < 1e-12);
        assert!(PwSignal::new(0.0, 0.0, ComplexVector::empty()).is_err());
    }

    #[test]
    fn generators_match_their_closed_forms() {
        let hat = Generator::Hat;
        assert_eq!(hat.eval(0.5), 0.5);
        assert_eq!(hat.eval(1.0), 1.0);
        assert_eq!(hat.eval(1.5), 0.5);
        assert_eq!(hat.eval(2.0), 0.0);
        assert_eq!(hat.eval(-0.1), 0.0);
        // Order-1 B-spline is the hat.
        for t in 0..=40 {
            let x = t as f64 * 0.1 - 1.0;
            assert!((Generator::BSpline(1).eval(x) - hat.eval(x)).abs() < 1e-15);
        }
        // Integer shifts of any order form a partition of unity.
        for &x in &[0.3, 1.45, 2.8] {
            let total: f64 = (-4..8).map(|n| Generator::BSpline(2).eval(x - n as f64)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn si_eval_matches_the_hat_segment_formula() {
        let coeffs = ComplexVector::new(0, vec![cx(1.0, 0.5), cx(-0.4, 1.2), cx(0.9, -0.8)]);
        let s = SiSignal::new(Generator::Hat, coeffs.clone());
        for k in -1..4_i64 {
            for t in [0.0, 0.25, 0.5, 0.9] {
                let want = coeffs.get(k) * t + coeffs.get(k - 1) * (1.0 - t);
                assert!((s.eval(k as f64 + t) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn counterexample_magnitudes_agree_but_classes_differ() {
        let (f, g) = counterexample_pair();
        let mut worst = 0.0_f64;
        for t in 0..=500 {
            let x = -1.0 + t as f64 * 0.01;
            worst = worst.max((f.eval(x).norm_sqr() - g.eval(x).norm_sqr()).abs());
        }
        assert!(worst <= 1e-14, "pointwise magnitude gap {worst}");
        let (d, branch) = dist_conj(f.coeffs(), g.coeffs());
        assert!((d - 2.0).abs() < 1e-12, "class distance {d}");
        // Both pairings are equally distant; ties report the identity.
        assert_eq!(branch.kind, crate::vector::BranchKind::Identity);
    }

    #[test]
    fn half_integer_sampling_covers_the_support() {
        let coeffs = ComplexVector::new(0, vec![cx(1.0, 0.2), cx(0.5, -1.0), cx(-0.3, 0.4)]);
        let s = SiSignal::new(Generator::Hat, coeffs);
        let samples = si_sample_half_integer(&s);
        assert_eq!(samples.logical_range(), 1..8);
        for (j, v) in samples.iter() {
            assert!((v - s.eval(j as f64 / 2.0)).norm() < 1e-15);
        }
        // Interior half-integer samples of a generic signal never vanish.
        assert!(samples.values().iter().all(|z| z.norm() > 0.0));
    }

    #[test]
    fn coefficient_fit_inverts_sampling() {
        let coeffs = ComplexVector::new(
            -2,
            vec![cx(1.0, 0.3), cx(-0.5, 1.0), cx(0.7, -0.4), cx(0.2, 0.8)],
        );
        let s = SiSignal::new(Generator::Hat, coeffs.clone());
        let samples = si_sample_half_integer(&s);
        let (fit, residual, sigma_min) =
            fit_si_coefficients(&samples, Generator::Hat, -2, 4, DEFAULT_TOL).unwrap();
        let gap: f64 = fit
            .coeffs()
            .iter()
            .map(|(n, c)| (c - coeffs.get(n)).norm())
            .fold(0.0, f64::max);
        assert!(gap < 1e-12, "coefficient gap {gap}");
        assert!(residual < 1e-12);
        assert!(sigma_min > 0.1);
    }

    #[test]
    fn two_reference_recovery_reaches_the_coefficients() {
        let coeffs = ComplexVector::new(
            0,
            vec![cx(1.0, 0.3), cx(-0.5, 1.0), cx(0.7, -0.4), cx(0.2, 0.8)],
        );
        let s = SiSignal::new(Generator::Hat, coeffs.clone());
        let samples = si_sample_half_integer(&s);
        let data = StructuredSamples::measure_two_reference(&samples, 4, 5).unwrap();
        let (recovered, report) =
            si_recover_two_reference(&data, Generator::Hat, 0, 4, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(recovered.coeffs(), &coeffs);
        assert!(d <= 1e-9 * coeffs.norm(), "dist {d}");
        assert!(report.deconvolution_residual.unwrap() < 1e-9);
        assert!(report.smallest_singular_value.unwrap() > 0.0);
    }

    #[test]
    fn adjacent_recovery_rebuilds_band_limited_signals() {
        let coeffs = ComplexVector::new(
            0,
            vec![cx(1.0, 0.4), cx(-0.6, 0.9), cx(0.3, -1.1), cx(0.8, 0.2), cx(-0.4, -0.7)],
        );
        let truth = PwSignal::new(0.5, 0.0, coeffs.clone()).unwrap();
        let data = StructuredSamples::measure_adjacent12(&coeffs);
        let (recovered, _) = pw_recover_adjacent(&data, 0.5, 0.0, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(recovered.coeffs(), truth.coeffs());
        assert!(d <= 1e-9 * coeffs.norm(), "dist {d}");
        assert_eq!(recovered.bandwidth(), 0.5);
    }

    #[test]
    fn magnitude_interpolation_closes_at_double_rate() {
        let coeffs = ComplexVector::new(
            0,
            vec![cx(1.0, 0.4), cx(-0.6, 0.9), cx(0.3, -1.1), cx(0.8, 0.2)],
        );
        let s = PwSignal::new(0.5, 0.0, coeffs).unwrap();
        let check = pw_magnitude_interp_check(&s, 0.05, 64);
        assert!(check.peak > 0.0);
        assert!(
            check.max_deviation <= 1e-2 * check.peak,
            "deviation {} vs peak {}",
            check.max_deviation,
            check.peak
        );
    }

    #[test]
    fn generator_wire_format() {
        assert_eq!(serde_json::to_string(&Generator::Hat).unwrap(), r#""hat""#);
        assert_eq!(serde_json::to_string(&Generator::BSpline(3)).unwrap(), r#"{"bspline":3}"#);
        let back: Generator = serde_json::from_str(r#"{"bspline":2}"#).unwrap();
        assert_eq!(back, Generator::BSpline(2));
    }
}
