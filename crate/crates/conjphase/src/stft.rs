//! Windowed correlation measurements of band-limited signals.
//!
//! Sliding a real band-limited window `w` along a signal `f` with the same
//! band and reading the correlation at grid lags gives the sequence
//! `h_j = (1/(2B))·Σ_m d_m·c_{j+m}`, where `c` are the signal's grid samples
//! and `d` the window's taps. Phaseless measurements deliver `|h_j|`; taking
//! the same readings with the window replaced by `w(·−s/(2B)) − w(·)` for
//! shifts `s = 1, 2` delivers `|h_{j+s} − h_j|`. Together that is exactly
//! adjacent12 data *for the correlation sequence*, so `h` is recovered by
//! the two-term recursion and the grid samples follow by deconvolving the
//! window — a real-linear step, which is why the unimodular-and-conjugation
//! class survives it.
//!
//! ## Example
//!
//! ```
//! use conjphase::stft::{correlation_sequence, Window};
//! use conjphase::vector::ComplexVector;
//! use num_complex::Complex64;
//!
//! let c = ComplexVector::new(0, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
//! let w = Window::new(0.5, 0, vec![1.0, 1.0]).unwrap();
//! let h = correlation_sequence(&c, &w);
//! assert_eq!(h.index_offset(), -1);
//! assert_eq!(h.values()[1], Complex64::new(1.0, 1.0));
//! ```

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::solve_least_squares;
use crate::recover::{recover_adjacent, RecoveryReport, StructuredSamples};
use crate::spaces::PwSignal;
use crate::vector::ComplexVector;

/// Real band-limited window `w(u) = Σ d_m·sinc(2B(u−x₀)−m)`, stored as its
/// tap sequence on the critical grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    bandwidth: f64,
    index_offset: i64,
    taps: Vec<f64>,
}

impl Window {
    /// Wraps a tap sequence; the bandwidth must be positive, the taps
    /// finite with at least one nonzero entry.
    pub fn new(bandwidth: f64, index_offset: i64, taps: Vec<f64>) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid(format!("bandwidth {bandwidth} must be positive")));
        }
        if taps.is_empty() {
            return Err(Error::invalid("window needs at least one tap"));
        }
        for (p, &t) in taps.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::invalid(format!("tap[{p}] = {t} is not finite")));
            }
        }
        if taps.iter().all(|&t| t == 0.0) {
            return Err(Error::invalid("window must have a nonzero tap"));
        }
        Ok(Window { bandwidth, index_offset, taps })
    }

    /// Band parameter `B`.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Index of the first tap.
    pub fn index_offset(&self) -> i64 {
        self.index_offset
    }

    /// Tap values.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// First and last tap index.
    pub fn tap_range(&self) -> (i64, i64) {
        (self.index_offset, self.index_offset + self.taps.len() as i64 - 1)
    }

    /// The window as a band-limited signal on the grid with origin `x0`,
    /// e.g. for evaluating it pointwise.
    pub fn to_pw_signal(&self, x0: f64) -> PwSignal {
        let coeffs = ComplexVector::from_reals(self.index_offset, &self.taps);
        PwSignal::new(self.bandwidth, x0, coeffs).expect("window invariants imply a valid signal")
    }
}

/// Correlation sequence `h_j = (1/(2B))·Σ_m d_m·c_{j+m}` of grid samples
/// `c` against window taps `d`, over its full support
/// `[c_lo − d_hi, c_hi − d_lo]`. Empty samples give an empty sequence.
pub fn correlation_sequence(c: &ComplexVector, w: &Window) -> ComplexVector {
    if c.is_empty() {
        return ComplexVector::empty();
    }
    let span = c.logical_range();
    let (c_lo, c_hi) = (span.start, span.end - 1);
    let (d_lo, d_hi) = w.tap_range();
    let factor = 1.0 / (2.0 * w.bandwidth());
    let h_lo = c_lo - d_hi;
    let h_hi = c_hi - d_lo;
    let values = (h_lo..=h_hi)
        .map(|j| {
            factor
                * w.taps()
                    .iter()
                    .enumerate()
                    .map(|(p, &tap)| tap * c.get(j + d_lo + p as i64))
                    .sum::<Complex64>()
        })
        .collect();
    ComplexVector::new(h_lo, values)
}

/// Phaseless windowed measurements of a band-limited signal: moduli of the
/// correlation sequence plus the moduli obtained with the two
/// shifted-difference windows — adjacent12 data for the sequence. The
/// signal and window must share their band.
pub fn stft_measure(f: &PwSignal, w: &Window) -> Result<StructuredSamples> {
    if f.bandwidth() != w.bandwidth() {
        return Err(Error::BandwidthMismatch { signal: f.bandwidth(), window: w.bandwidth() });
    }
    let h = correlation_sequence(f.coeffs(), w);
    Ok(StructuredSamples::measure_adjacent12(&h))
}

/// Recovers a band-limited signal from windowed measurements: the two-term
/// recursion rebuilds the correlation sequence up to the class, and
/// deconvolving the (real) window by least squares maps it back to grid
/// samples without leaving the class. `x0` fixes the grid origin of the
/// result.
pub fn stft_recover(
    data: &StructuredSamples,
    w: &Window,
    x0: f64,
    tol: f64,
) -> Result<(PwSignal, RecoveryReport)> {
    let (h, mut report) = recover_adjacent(data, tol)?;
    if h.len() < w.taps().len() {
        return Err(Error::invalid(format!(
            "{} correlation samples cannot outlast a {}-tap window",
            h.len(),
            w.taps().len()
        )));
    }
    let span = h.logical_range();
    let (h_lo, h_hi) = (span.start, span.end - 1);
    let (d_lo, d_hi) = w.tap_range();
    let c_lo = h_lo + d_hi;
    let c_hi = h_hi + d_lo;
    let c_len = (c_hi - c_lo + 1) as usize;
    let rows = h.len();
    let factor = 1.0 / (2.0 * w.bandwidth());

    let mut a = nalgebra::DMatrix::zeros(rows, c_len);
    for r in 0..rows {
        let j = h_lo + r as i64;
        for k in 0..c_len {
            let m = (c_lo + k as i64) - j;
            if m >= d_lo && m <= d_hi {
                a[(r, k)] = factor * w.taps()[(m - d_lo) as usize];
            }
        }
    }
    let re: Vec<f64> = h.values().iter().map(|z| z.re).collect();
    let im: Vec<f64> = h.values().iter().map(|z| z.im).collect();
    let sol_re = solve_least_squares(&a, &re, tol, "window deconvolution")?;
    let sol_im = solve_least_squares(&a, &im, tol, "window deconvolution")?;
    let coeffs = ComplexVector::new(
        c_lo,
        sol_re
            .solution
            .iter()
            .zip(&sol_im.solution)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect(),
    );
    report.deconvolution_residual = Some(sol_re.residual.hypot(sol_im.residual));
    report.smallest_singular_value = Some(sol_re.sigma_min);
    Ok((PwSignal::new(w.bandwidth(), x0, coeffs)?, report))
}

// ── JSON wire format ────────────────────────────────────────────────────────
//
// {"coeffs": [1.0, 0.5], "index_offset": 0, "B": 0.5}

#[derive(Serialize, Deserialize)]
struct WindowWire {
    coeffs: Vec<f64>,
    index_offset: i64,
    #[serde(rename = "B")]
    bandwidth: f64,
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WindowWire {
            coeffs: self.taps.clone(),
            index_offset: self.index_offset,
            bandwidth: self.bandwidth,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WindowWire::deserialize(deserializer)?;
        Window::new(wire.bandwidth, wire.index_offset, wire.coeffs)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}
