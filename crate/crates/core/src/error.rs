//! Crate-wide error type.

/// Machine-readable failure category, used by front ends to classify errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// A value failed a structural invariant (hermiticity, normalization, ...).
    Validation,
    /// An argument violated a precondition (overlapping sets, bad index, ...).
    Argument,
    /// A requested object exceeds the configured entity cap.
    Capacity,
    /// A numerical procedure could not reach its target.
    Numeric,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Validation => "validation",
            ErrorCategory::Argument => "argument",
            ErrorCategory::Capacity => "capacity",
            ErrorCategory::Numeric => "numeric",
        }
    }
}

/// Errors produced by the core modules.
///
/// Residuals are reported as `f64` regardless of the scalar the computation
/// ran at; they are diagnostics, not data.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("operator is not hermitian (max |A - A^H| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not unitary (max |A^H A - I| = {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not positive semi-definite ({context}: min eigenvalue = {min_eigenvalue:.3e})")]
    NotPsd { context: String, min_eigenvalue: f64 },

    #[error("state vector is not normalized (|norm - 1| = {residual:.3e})")]
    NotNormalized { residual: f64 },

    #[error("density operator trace is not 1 (|tr - 1| = {residual:.3e})")]
    BadTrace { residual: f64 },

    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("requested {requested} entities exceeds the configured cap of {max} (set EINSEL_MAX_ENTITIES to raise it, hard limit {hard})")]
    Capacity { requested: usize, max: usize, hard: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("POVM effects do not sum to identity (max entry residual = {residual:.3e})")]
    PovmIncomplete { residual: f64 },

    #[error("duplicate outcome label {label:?}")]
    DuplicateLabel { label: String },

    #[error("invalid outcome label {label:?}: {reason}")]
    BadLabel { label: String, reason: String },

    #[error("interaction Hamiltonian is zero: no basis is einselected")]
    ZeroInteraction,

    #[error("bases do not jointly diagonalize the interaction (leakage = {leakage:.3e})")]
    NotJointlyDiagonal { leakage: f64 },

    #[error("projection has zero norm: outcome is impossible at this state")]
    ZeroNormProjection,

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Category tag for machine-readable front-end reporting.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::NotHermitian { .. }
            | Error::NotUnitary { .. }
            | Error::NotPsd { .. }
            | Error::NotNormalized { .. }
            | Error::BadTrace { .. }
            | Error::NotPowerOfTwo { .. }
            | Error::PovmIncomplete { .. }
            | Error::DuplicateLabel { .. }
            | Error::BadLabel { .. }
            | Error::NotJointlyDiagonal { .. } => ErrorCategory::Validation,
            Error::DimMismatch { .. } | Error::Argument(_) | Error::ZeroInteraction => {
                ErrorCategory::Argument
            }
            Error::Capacity { .. } => ErrorCategory::Capacity,
            Error::ZeroNormProjection | Error::Numeric(_) => ErrorCategory::Numeric,
        }
    }
}

pub type Result<V> = std::result::Result<V, Error>;
