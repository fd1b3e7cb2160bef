use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero not strictly inside disk: |a| = {modulus}")]
    ZeroOutsideDisk { modulus: f64 },

    #[error("front constant is not unimodular: |front| = {modulus}")]
    NonUnimodularFront { modulus: f64 },

    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },

    #[error("point outside the closed unit disk: |z| = {modulus}")]
    OutsideDisk { modulus: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical invariant exceeded its tolerance. `invariant` names it.
    #[error("tolerance violated: {invariant} = {value:.3e} (limit {limit:.1e})")]
    Tolerance {
        invariant: String,
        value: f64,
        limit: f64,
    },

    #[error("{what} did not converge")]
    NoConvergence { what: String },

    #[error("input is ill-conditioned: {0}")]
    IllConditioned(String),

    /// A pipeline stage failed; `stage` names it.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn tolerance(invariant: impl Into<String>, value: f64, limit: f64) -> Self {
        Error::Tolerance {
            invariant: invariant.into(),
            value,
            limit,
        }
    }

    pub(crate) fn in_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// True for usage-type errors (bad input), as opposed to numerical failures.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidArgument(_)
            | Error::ZeroOutsideDisk { .. }
            | Error::NonUnimodularFront { .. }
            | Error::DegreeTooLarge { .. }
            | Error::OutsideDisk { .. }
            | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
