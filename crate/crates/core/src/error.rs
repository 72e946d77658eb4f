use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// The CLI maps these onto exit codes: domain errors (a jet outside the
/// region where the invariants are defined) exit with 1, everything that is a
/// malformed input exits with 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },

    #[error("symbol `{0}` is not invertible")]
    NotInvertible(String),

    #[error("exponent vector has arity {found}, ring has {expected} variables")]
    ArityMismatch { expected: usize, found: usize },

    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("order {order} is below the minimum {min}")]
    OrderTooLow { order: usize, min: usize },

    #[error("constant term is not invertible")]
    NonInvertibleConstant,

    #[error("jet in the invariant subspace u1=0")]
    DegenerateJet,

    #[error("ill-conditioned jet: |u1| = {u1:e} is below {threshold:e} of the largest coefficient")]
    IllConditionedJet { u1: f64, threshold: f64 },

    #[error("Moebius transformation is singular (ad - bc = 0)")]
    SingularMobius,

    #[error("Moebius stabilizer parameter a must be nonzero")]
    ZeroStabilizerScale,

    #[error("transformation has a pole at the base point")]
    Pole,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is too small (need n >= 2)")]
    DimensionTooSmall(usize),

    #[error("gradient is not timelike: u^2 = {norm:e}")]
    NonTimelikeGradient { norm: f64 },

    #[error("gradient norm (grad f)^2 vanishes")]
    VanishingGradient,

    #[error("covector is not unit timelike: u^2 = {norm:e}")]
    NotUnitTimelike { norm: f64 },

    #[error("matrix is not a Lorentz transformation: residual {residual:e}")]
    NotLorentz { residual: f64 },

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("jet first-order part is not e0: residual {residual:e}")]
    NotCanonicalForm { residual: f64 },

    #[error("matrix is not symmetric: residual {residual:e}")]
    NotSymmetric { residual: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("linear part is singular (det A = 0)")]
    SingularLinearPart,

    #[error("singular point: special conformal denominator {denominator:e}")]
    SingularPoint { denominator: f64 },

    #[error("closed form only available in dimension {expected}, jet has dimension {found}")]
    UnsupportedDimension { expected: usize, found: usize },

    #[error("degree {degree} exceeds the catalog cap {cap}")]
    DegreeTooHigh { degree: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors that say "this input lies outside the domain of the
    /// invariants" rather than "this input is malformed".
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DegenerateJet
                | Error::IllConditionedJet { .. }
                | Error::NonTimelikeGradient { .. }
                | Error::VanishingGradient
                | Error::Pole
                | Error::SingularPoint { .. }
                | Error::OrderTooLow { .. }
        )
    }
}
