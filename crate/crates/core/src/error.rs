use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NonHermitianInput(f64),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("probabilities do not sum to one (sum = {0})")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("map is not completely positive (min Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("rate table does not cover t = {0}")]
    RateTableOutOfRange(f64),
    #[error("invalid noise model: {0}")]
    InvalidModel(String),
    #[error("integration diverged near t = {0}")]
    IntegrationDiverged(f64),
    #[error("propagated map is not CPTP (min Choi eigenvalue {0:.3e})")]
    NotCptp(f64),
    #[error("outcome {0} has zero probability but nonzero derivative")]
    SingularOutcome(usize),
    #[error("Fisher information is zero")]
    ZeroInformation,
    #[error("state derivative is not Hermitian (defect {0:.3e})")]
    NonHermitianDerivative(f64),
    #[error("state derivative is not traceless (trace {0:.3e})")]
    NonTracelessDerivative(f64),
    #[error("finite-difference step too large: one-sided estimates {left:.6e} and {right:.6e} disagree")]
    StepTooLarge { left: f64, right: f64 },
    #[error("rank mismatch: expected {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("optimizer failed: {0}")]
    OptimizerFailed(String),
    #[error("objective is identically zero on the time window")]
    FlatObjective,
    #[error("operation requires theta = pi/2, got {0}")]
    WrongAngle(f64),
    #[error("could not bracket the root")]
    BracketFailed,
    #[error("operation requires a single qubit, got dimension {0}")]
    NotSingleQubit(usize),
    #[error("signal slope is zero")]
    ZeroSlope,
    #[error("likelihood is degenerate at the true parameter")]
    LikelihoodDegenerate,
    #[error("engine {engine} cannot handle this model: {reason}")]
    EngineModelMismatch { engine: String, reason: String },
    #[error("every row of the sweep hit the time-window boundary")]
    AllRowsInvalid,
    #[error("fit needs at least {needed} valid rows, found {found}")]
    InsufficientRows { found: usize, needed: usize },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("csv error: {0}")]
    Csv(String),
}

impl Error {
    /// Errors caused by bad user input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidModel(_)
                | Error::InvalidArgument(_)
                | Error::EngineModelMismatch { .. }
                | Error::WrongAngle(_)
                | Error::NegativeTime(_)
                | Error::Io(_)
                | Error::Csv(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
