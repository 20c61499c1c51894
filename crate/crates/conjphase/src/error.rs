//! Error taxonomy for measurement and recovery.
//!
//! The variants separate four failure classes that callers treat
//! differently: malformed input, violated recoverability hypotheses
//! (collinearity and graph structure), magnitude data that no complex signal
//! can produce, and numerical breakdown of an otherwise valid computation.
//! The CLI maps these classes onto distinct exit codes.

use crate::graph::Diagnosis;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while measuring or recovering a signal.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Structurally invalid input: bad lengths, missing fields, unknown
    /// names, out-of-range references, malformed files.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Magnitude data violating the triangle inequality (or another
    /// realizability constraint) beyond tolerance: no signal produces it.
    #[error("infeasible magnitudes: {0}")]
    InfeasibleMagnitudes(String),

    /// The recoverability hypothesis failed: some vertex lies in no
    /// triangle, or the triangle graph is disconnected.
    #[error("recoverability hypothesis failed: {0}")]
    HypothesisFailed(Diagnosis),

    /// No non-collinear edge is available to seed phase propagation.
    #[error("no non-collinear edge available to seed propagation")]
    NoNoncollinearEdge,

    /// The two reference entries form a collinear pair, so the reference
    /// scheme cannot pin down the imaginary direction.
    #[error("reference pair ({k}, {l}) is collinear (margin {margin:.3e})")]
    ReferenceCollinear { k: i64, l: i64, margin: f64 },

    /// The adjacent pair starting at logical index `n` is collinear, which
    /// the adjacent-pair scheme cannot tolerate anywhere.
    #[error("adjacent pair ({n}, {m}) is collinear (margin {margin:.3e})", m = n + 1)]
    AdjacentCollinear { n: i64, margin: f64 },

    /// A sample that must be nonzero (real sign propagation) is zero.
    #[error("zero sample at logical index {0}")]
    ZeroSample(i64),

    /// Signal and window are declared on different bandwidths.
    #[error("bandwidth mismatch: signal B = {signal}, window B = {window}")]
    BandwidthMismatch { signal: f64, window: f64 },

    /// A 2×2 propagation step became numerically singular.
    #[error("numerically singular 2x2 system at logical index {index} (|det| = {determinant:.3e})")]
    NumericallySingular { index: i64, determinant: f64 },

    /// A least-squares system (window deconvolution, coefficient fit) is too
    /// ill conditioned to trust.
    #[error("ill-conditioned {context} system: smallest singular value {sigma_min:.3e} (largest {sigma_max:.3e})")]
    IllConditioned {
        context: &'static str,
        sigma_min: f64,
        sigma_max: f64,
    },
}

impl Error {
    /// Shorthand for [`Error::Invalid`] with a formatted message.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Shorthand for [`Error::InfeasibleMagnitudes`] with a formatted message.
    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::InfeasibleMagnitudes(msg.into())
    }
}
