//! Conjugate phase retrieval for structured magnitude measurements.
//!
//! A complex signal can never be identified from magnitudes alone: a global
//! unimodular factor `e^{iα}` is invisible, and for many measurement schemes
//! so is complex conjugation. This crate recovers signals *up to exactly that
//! ambiguity* from two kinds of phaseless data:
//!
//! * absolute magnitudes `|f_n|` at designated indices, and
//! * relative magnitudes `|f_n − f_m|` for designated index pairs.
//!
//! ## Blocks
//!
//! * [`vector`] — complex vectors with logical indexing and the equivalence
//!   metric `dist_conj` (distance up to phase and conjugation).
//! * [`measure`] — the forward measurement map and the polarization identity
//!   that turns the phaseless data into real inner products.
//! * [`graph`] — measurement graphs, triangle (3-clique) enumeration, the
//!   derived triangle graph whose connectivity certifies recoverability, and
//!   breadth-first phase propagation.
//! * [`recover`] — closed-form reconstructions for structured sample schemes
//!   (adjacent pairs, two fixed references, real sign propagation).
//! * [`spaces`] — bandlimited (Paley–Wiener) and shift-invariant signal
//!   models, sampling grids, and the classic ambiguity witness pair.
//! * [`stft`] — time-domain STFT magnitudes at zero frequency: windowed
//!   measurement as a coefficient cross-correlation, and recovery by
//!   deconvolution.
//! * [`formats`] — JSON wire formats shared with the command-line tool.
//! * [`scheme`] — recovery strategies behind a common trait, registered by
//!   name and selected at run time.
//!
//! ## Example
//!
//! ```
//! use conjphase::vector::{ComplexVector, dist_conj};
//! use num_complex::Complex64;
//!
//! let i = Complex64::I;
//! let one = Complex64::ONE;
//! // The two signals below share every |f_n| and |f_n − f_m|-style datum a
//! // pointwise-magnitude scheme can see, yet are far apart as vectors.
//! let f = ComplexVector::new(0, vec![one, i, one]);
//! let g = ComplexVector::new(0, vec![-one, i, one]);
//! let (d, _) = dist_conj(&f, &g);
//! assert!((d - 2.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod formats;
pub mod graph;
pub mod measure;
pub mod recover;
pub mod scheme;
pub mod spaces;
pub mod stft;
pub mod vector;

mod linalg;

#[cfg(feature = "test-oracles")]
pub mod oracles;

pub use error::{Error, Result};

/// Default relative tolerance for non-collinearity margins, feasibility
/// checks, and singularity guards. Override per call or, in the CLI, via the
/// `CONJPHASE_TOL` environment variable.
pub const DEFAULT_TOL: f64 = 1e-9;
