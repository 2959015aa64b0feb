use thiserror::Error;

use crate::lie::Formulation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a map (singular dexp⁻¹, angle-π log, undefined pitch).
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("formulation mismatch: expected {expected}, found {found}")]
    FormulationMismatch {
        expected: Formulation,
        found: Formulation,
    },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("saddle system singular or ill-conditioned at t = {t} (condition estimate {condition:e})")]
    SingularSaddle { t: f64, condition: f64 },

    #[error("saddle solve residual {residual:e} exceeds tolerance {tolerance:e} at t = {t}")]
    SaddleResidual {
        t: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("constraint jacobian is rank deficient")]
    RankDeficient,

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("integration failed at step {step} (t = {t}): {source}")]
    Integration {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size controller failed at t = {t}: {detail}")]
    StepControl { t: f64, detail: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// Strips `Stage`/`Integration` wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } | Error::Integration { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
