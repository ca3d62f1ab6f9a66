use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("no symmetric block design found for d={d} (n={n})")]
    NoBlockDesign { d: usize, n: usize },
    #[error("constrained random design could not place object {object} under v_max={v_max} after {attempts} attempts")]
    InfeasibleConstraint { object: usize, v_max: usize, attempts: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("enumeration of {subsets} subsets exceeds budget of {budget}; use sampled mode")]
    BudgetExceeded { subsets: u128, budget: u128 },
    #[error("object {object} is not stored on node {node}")]
    NotStored { object: usize, node: usize },
    #[error("object {object} is already stored on node {node}")]
    AlreadyStored { object: usize, node: usize },
    #[error("demand vector has length {got}, allocation has {expected} objects")]
    LengthMismatch { expected: usize, got: usize },
    #[error("load threshold must be positive, got {0}")]
    NonpositiveThreshold(f64),
    #[error("subset enumeration needs k <= {max}, got k={k}")]
    TooLarge { k: usize, max: usize },
    #[error("moment generating function diverges at t={0}")]
    Diverges(f64),
    #[error("window {s} does not fit a sequence of length {n}")]
    WindowTooLarge { s: usize, n: usize },
    #[error("sequence length {n} is shorter than 3 windows of {s}")]
    TooShort { n: usize, s: usize },
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("bad mode: {0}")]
    BadMode(String),
    #[error("demand model {0} has an atom at zero; asymptotic bounds need strictly positive demands")]
    NonpositiveDemandModel(String),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("invalid demand model: {0}")]
    InvalidModel(String),
    #[error("parse error: {0}")]
    Parse(String),
}
