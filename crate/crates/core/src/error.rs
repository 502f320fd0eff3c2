use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} supports at most N = {max} bath spins, got N = {n}")]
    TooManySpins { what: &'static str, n: usize, max: usize },

    #[error("bath is not uniform: {0}")]
    NonUniform(String),

    #[error("unknown preparation mode `{0}`")]
    UnknownMode(String),

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("pure state with non-zero radial derivative (r.dr = {0:e}); QFI is unbounded")]
    PureStateRadialDerivative(f64),

    #[error("eigenvalue {eigenvalue:e} vanishes while its derivative {derivative:e} does not; QFI is unbounded")]
    UnboundedFisher { eigenvalue: f64, derivative: f64 },

    #[error("closed-form QFI outside its domain: exp(2 Gamma) = {exp_two_gamma:e} <= f = {f:e}")]
    ClosedFormDomain { exp_two_gamma: f64, f: f64 },

    #[error("QFI evaluated to {0:e}, below the clipping tolerance")]
    NegativeFisher(f64),

    #[error("finite-difference step shrank below {0:e} at the domain boundary")]
    StepUnderflow(f64),

    #[error("projection overlap {0:e} underflows")]
    ProjectionUnderflow(f64),

    #[error("invalid time window: {0}")]
    InvalidWindow(String),

    #[error("objective is not finite anywhere on the time window")]
    NoFiniteValue,

    #[error("dense oracle: {0}")]
    Oracle(String),

    #[error("malformed parameter header: {0}")]
    Header(String),
}

impl Error {
    /// True for errors caused by the requested configuration rather than by
    /// the numerics of a valid configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::TooManySpins { .. }
                | Error::NonUniform(_)
                | Error::UnknownMode(_)
                | Error::UnknownEstimator(_)
                | Error::InvalidWindow(_)
                | Error::Header(_)
        )
    }
}
