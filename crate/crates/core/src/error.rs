use thiserror::Error;

use crate::spins::GateReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("region of radius {radius} Å holds only {available} neighbor shells, {requested} requested")]
    InsufficientRegion {
        radius: f64,
        requested: usize,
        available: usize,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid donor model: {0}")]
    InvalidModel(String),

    #[error("gaussian fit did not converge (residual {residual:.3e})")]
    FitFailure { residual: f64 },

    #[error("ill-conditioned pair geometry: |S| = {overlap:.6}")]
    IllConditioned { overlap: f64 },

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("spin system of {spins} spins exceeds the dense limit of {limit}")]
    TooLarge { spins: usize, limit: usize },

    #[error("no gate time leaves the control disentangled (best residual {:.3e} bits at {:.4} ps)", best.control_residual_entanglement, best.duration_ps)]
    NoCleanGate { best: Box<GateReport> },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }
}
