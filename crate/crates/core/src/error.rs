use thiserror::Error;

/// Errors raised by the kernel. Verdict-producing operations report
/// undecided or refuted properties through [`crate::Verdict`] instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arity mismatch: term needs {needed} inputs, got {given}")]
    ArityMismatch { needed: usize, given: usize },

    #[error("non-finite value during evaluation")]
    NonFiniteResult,

    #[error("non-finite coordinate in point")]
    NonFinitePoint,

    #[error("primitive {0} has no exact value in this scalar domain")]
    NotRepresentable(&'static str),

    #[error("morphisms are not parallel: {0}")]
    ParallelismViolation(String),

    #[error("morphisms do not share a source: {0}")]
    SourceMismatch(String),

    #[error("morphisms are not composable: {0}")]
    NotComposable(String),

    #[error("unsupported denominator {0}: only denominator 1 is implemented")]
    UnsupportedDenominator(String),

    #[error("certificate has {given} multipliers, expected {expected}")]
    CertificateShape { expected: usize, given: usize },

    #[error("covering certificate refuted: common zero at {witness:?}")]
    CertificateRefuted { witness: Vec<f64> },

    #[error("covering certificate not found within search bound {bound}")]
    CertificateNotFound { bound: u32 },

    #[error("a cover needs at least one element")]
    EmptyCover,

    #[error("refinement {index} is not a cover of the expected localization")]
    RefinementMismatch { index: usize },

    #[error("refinement {index} uses an element that is not the image of a base element")]
    NotLiftedElement { index: usize },

    #[error("enumeration overflow: {needed} candidates exceed budget {budget}")]
    EnumerationOverflow { needed: usize, budget: usize },

    #[error("relation violated by mapped solution (residual {residual:e})")]
    RelationViolation { residual: f64 },

    #[error("model {0} does not support this operation")]
    UnsupportedModel(String),

    #[error("carrier value has {given} coordinates, model expects {expected}")]
    CarrierShape { expected: usize, given: usize },

    #[error("invalid literal `{0}`")]
    InvalidLiteral(String),
}

pub type Result<T> = std::result::Result<T, Error>;
