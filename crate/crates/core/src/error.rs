use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("series constant term must be exactly 1")]
    ConstantTermNotOne,
    #[error("constant factor raised to a non-integral power is not representable exactly")]
    IrrationalScale,
    #[error("bivariate series has off-diagonal terms and is not radial")]
    NotRadial,
    #[error("metric must have a positive constant term")]
    NonpositiveConstant,
    #[error("malformed spec: {0}")]
    MalformedSpec(String),
    #[error("kernel coefficient a_0 must equal 1 (got {0})")]
    NonUnitConstant(String),
    #[error("need coefficients through index {needed}, series is known through {available}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("constant-term matrix is singular")]
    SingularConstantTerm,
    #[error("Gram determinant is not radial")]
    NotRadialDeterminant,
    #[error("denominator series has zero constant term")]
    ZeroDenominator,
    #[error("every section vanishes at the origin")]
    ZeroSection,
    #[error("frame is ill-conditioned at the sample point: {0}")]
    IllConditionedFrame(String),
    #[error("kernel coefficient a_{index} is not positive")]
    NonpositiveCoefficient { index: usize },
    #[error("expected a power kernel, got {0}")]
    NotPowerKernel(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("{what} = {value} exceeds the supported limit {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
