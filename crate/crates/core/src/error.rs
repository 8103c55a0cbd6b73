use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root finder did not converge: {0}")]
    RootNotConverged(&'static str),

    #[error("weighted normal matrix is rank deficient (reciprocal condition {rcond:e})")]
    RankDeficient { rcond: f64 },

    #[error("effective sample size {weight_sum} does not exceed the {p} coefficients")]
    InsufficientEffectiveSample { weight_sum: f64, p: usize },

    #[error("scale estimate collapsed to zero")]
    DegenerateScale,

    #[error("no converged EM solution has omega above the selection floor")]
    FitFailure,

    #[error("degrees of freedom {df} are not positive")]
    InsufficientDf { df: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(&'static str),

    #[error("response has no weighted variation")]
    DegenerateResponse,

    #[error("Tukey M-estimator did not converge within {0} iterations")]
    BaselineFailure(usize),

    #[error("{failed} of {total} replications failed for {estimator}")]
    TooManyFailures {
        estimator: String,
        failed: usize,
        total: usize,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
