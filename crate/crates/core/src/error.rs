use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A cohesive evaluation was requested on a branch the state cannot be on.
    #[error("invalid cohesive state: {0}")]
    InvalidState(String),

    #[error("element {element}: {reason}")]
    Geometry { element: usize, reason: String },

    #[error("mesh: {0}")]
    Mesh(String),

    /// Strain with coincident principal values; no crack normal can be defined.
    #[error("degenerate crack orientation (isotropic strain)")]
    DegenerateOrientation,

    #[error("linear solver: {0}")]
    LinearSolver(String),

    #[error("more than {limit} crack activations in one load step")]
    ActivationLimit { limit: usize },

    #[error("load step {step}: {reason}")]
    StepFailure { step: usize, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn geometry(element: usize, reason: impl Into<String>) -> Self {
        Error::Geometry {
            element,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
