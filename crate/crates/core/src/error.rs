use thiserror::Error;

/// Errors raised across the simulator, solvers and report writers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {0} out of range 1..=5")]
    QubitOutOfRange(usize),

    #[error("gate acts on qubit {0} twice")]
    RepeatedQubit(usize),

    #[error("embedded block is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("element {0} out of range 0..=3")]
    ElementOutOfRange(usize),

    #[error("order {0} out of range 1..=4")]
    OrderOutOfRange(usize),

    #[error("invalid sequence token `{token}` at position {position}")]
    InvalidToken { token: String, position: usize },

    #[error("operation {0} is not allowed in a preparation sequence")]
    NotAPrepOp(String),

    #[error("spin count {0} out of range 1..=5")]
    SpinCountOutOfRange(usize),

    #[error("no preparation schedule found with at most {max_experiments} experiments")]
    SearchExhausted { max_experiments: usize },

    #[error("infeasible input: {0}")]
    InfeasibleInput(String),

    #[error("linear program is {0}")]
    LpFailure(&'static str),

    #[error("invalid molecule config: {0}")]
    Config(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
