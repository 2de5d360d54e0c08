use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("space is not a VE-module")]
    NotAModule,

    #[error("operator is not adjointable (residual {residual:.3e})")]
    NotAdjointable { residual: f64 },

    #[error("gramian is degenerate: nonzero vector with zero gramian")]
    DegenerateGram,

    #[error("operator is not selfadjoint (residual {residual:.3e})")]
    NotSelfadjoint { residual: f64 },

    #[error("gramian is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e} on points {witness:?}")]
    NotPsd {
        min_eigenvalue: f64,
        witness: Vec<usize>,
    },

    #[error("kernel is not 2-positive (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotTwoPositive { min_eigenvalue: f64 },

    #[error("kernel is not invariant: element {xi}, x={x}, y={y}, residual {residual:.3e}")]
    NotInvariant {
        xi: usize,
        x: usize,
        y: usize,
        residual: f64,
    },

    #[error("null direction does not stay null under the quotient map (residual {residual:.3e})")]
    DegenerateQuotientFailure { residual: f64 },

    #[error("realisations are not unitarily equivalent (residual {residual:.3e})")]
    Inequivalent { residual: f64 },

    #[error("additivity hypothesis fails at x={x}, y={y} (residual {residual:.3e})")]
    HypothesisFails { x: usize, y: usize, residual: f64 },

    #[error("unknown point {0}")]
    UnknownPoint(String),

    #[error("linearisation is not minimal: {0}")]
    NotMinimal(String),

    #[error("algebra axioms fail: {0}")]
    NonAssociative(String),

    #[error("module structure violated: {what} (residual {residual:.3e})")]
    ModuleViolation { what: String, residual: f64 },

    #[error("invalid semigroup data: {0}")]
    InvalidSemigroup(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("reference error: {0}")]
    Reference(String),

    #[error("digest mismatch: certificate {recorded}, problem {computed}")]
    DigestMismatch { recorded: String, computed: String },
}
