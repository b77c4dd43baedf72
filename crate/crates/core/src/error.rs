use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("set is empty")]
    EmptySet,
    #[error("endpoint {value} on axis {axis} is not a grid breakpoint")]
    AlignmentError { axis: usize, value: f64 },
    #[error("functions live on different domains")]
    DomainMismatch,
    #[error("invalid values: {0}")]
    InvalidValues(String),
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("root finder did not converge within {iterations} iterations")]
    ConvergenceError { iterations: usize },
    #[error("p(x0) = {value} exceeds p_minus = {p_minus}")]
    NotAMinimizer { value: f64, p_minus: f64 },
    #[error("no candidate family given")]
    EmptyFamily,
    #[error("need at least {needed} samples in the fit range, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("curves are not sampled on a common grid")]
    GridMismatch,
    #[error("witness leaves the domain: {0}")]
    WitnessOutOfDomain(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("certificate at t = {t} has norm {norm} > 1")]
    CertificateFailed { t: f64, norm: f64 },
    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::ConvergenceError { .. } | Error::CertificateFailed { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
