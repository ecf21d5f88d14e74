use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("photon number {photons} exceeds the configured cap of {cap}")]
    PhotonCap { photons: usize, cap: usize },

    #[error("invalid mode placement: {0}")]
    Placement(String),

    #[error("overlapping dual-rail pairs: mode {0} is used twice")]
    OverlappingPairs(usize),

    #[error("probability {0} outside [0, 0.5)")]
    Probability(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("heralding never succeeded over {0} trajectories")]
    HeraldNeverSucceeded(usize),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("qubit {0} was already measured")]
    QubitConsumed(usize),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a description of what was running.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error beneath any context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Whether the error stems from invalid input rather than a failed
    /// simulation.
    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Config(_)
                | Error::Probability(_)
                | Error::UnsupportedGate(_)
                | Error::Placement(_)
                | Error::OverlappingPairs(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
