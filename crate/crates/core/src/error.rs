//! Error type shared across the library.
//!
//! Variants are grouped by origin: bad inputs or configuration (caught before
//! any numerics run), numerical failures inside an algorithm, and runtime
//! violations detected while a simulation is in flight. The CLI maps these
//! groups onto distinct exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input value or matrix entry was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// A matrix that must be symmetric is not, beyond the entry tolerance.
    #[error("matrix not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {delta:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        delta: f64,
        tol: f64,
    },

    /// A matrix that must be positive definite has a non-positive eigenvalue.
    #[error("matrix not positive definite in {context}: smallest eigenvalue {lambda_min:.6e}")]
    NotPositiveDefinite { context: String, lambda_min: f64 },

    /// Operands have incompatible or unsupported dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A scenario file or scenario-level setting is unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// The steady-state equation produced a non-positive-definite candidate:
    /// the closed-loop matrix is not Hurwitz, so no valid solution exists.
    #[error("no positive definite solution: the closed-loop matrix is not Hurwitz")]
    NotHurwitz,

    /// A linear solve hit a negligible pivot; the system is singular or
    /// numerically indistinguishable from singular.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// An iterative routine failed to reach its accuracy target.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The sampling error is negligible, so an expression that divides by
    /// |e| is undefined; callers must take the e = 0 branch instead.
    #[error("sampling error norm is negligible; the ratio |x|/|e| is undefined")]
    ZeroErrorNorm,

    /// Trigger bookkeeping reached a state the update rules cannot produce
    /// (e.g. a countdown above its reset value, or a negative storage
    /// variable) — evidence of a missed event or an integration defect.
    #[error("trigger state inconsistent: {0}")]
    TriggerConsistency(String),

    /// The state norm blew past the divergence guard.
    #[error("state diverged at t = {t:.6}: |x| = {norm:.3e}")]
    Divergence { t: f64, norm: f64 },

    /// Events accumulated without time advancing.
    #[error("event accumulation at t = {t:.9}: trigger fires again immediately after a reset")]
    Zeno { t: f64 },

    /// A statistic was requested from too little data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An internal invariant failed; indicates a bug rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),
}
