use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame of discernment must contain at least one label")]
    EmptyFrame,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("empty label at position {0}")]
    EmptyLabel(usize),
    #[error("frame has {0} singletons; at most {max} are supported", max = crate::frame::MAX_FRAME_SIZE)]
    FrameTooLarge(usize),
    #[error("label `{0}` is not part of the frame")]
    UnknownLabel(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("invalid basic probability assignment: {0}")]
    InvalidBpa(String),
    #[error("table is not a belief function: recovered mass {mass} on {set}")]
    NotABeliefFunction { set: String, mass: f64 },
    #[error("conditioning event {event} has zero belief")]
    ZeroBeliefEvent { event: String },
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("cautious strategy found no shared conditioning events while alpha < 1")]
    EmptyEventSet,
    #[error("Dirichlet gamma must lie strictly between 0 and 1, got {0}")]
    InvalidGamma(f64),
    #[error("Bayes baseline not applicable: {0}")]
    BaselineInapplicable(String),
    #[error("invalid strategy `{0}`")]
    InvalidStrategy(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: step index {k} does not follow {previous}")]
    NonMonotoneIndex { line: usize, previous: u64, k: u64 },
    #[error("step {k}: {source}")]
    AtStep {
        k: u64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_step(self, k: u64) -> Self {
        Error::AtStep {
            k,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
