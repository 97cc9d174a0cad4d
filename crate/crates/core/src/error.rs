use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid test set: {0}")]
    InvalidSet(String),
    #[error("unsupported set: {0}")]
    UnsupportedSet(String),
    #[error("operation not supported on this measure: {0}")]
    Unsupported(String),
    #[error("measure is not a probability (total mass {0})")]
    NotProbability(f64),
    #[error("cannot normalize the zero measure")]
    ZeroMass,
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error("invalid ratios: {0}")]
    InvalidRatios(String),
    #[error("no root in bracket")]
    NoRoot,
    #[error("Lyapunov exponent must be nonzero")]
    ZeroExponent,
    #[error("measure does not have the expected shape: {0}")]
    WrongShape(String),
    #[error("too few points in fit window ({0} < 3)")]
    TooFewPoints(usize),
    #[error("non-positive value {value} at scale {r}")]
    NonPositiveValue { r: f64, value: f64 },
    #[error("correlation sum vanishes across the fit window")]
    EmptyCorrelation,
    #[error("every sample has a zero-mass ball at some scale")]
    DegenerateBall,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
