use thiserror::Error;

/// Errors raised by the calculator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SclError {
    #[error("syntax error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("nonpositive coefficient {coeff} at byte {position}")]
    NonPositiveCoefficient { position: usize, coeff: String },

    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),

    #[error("chain has no hyperbolic terms")]
    EmptyChain,

    #[error("s-value undefined for a word with h = {0}")]
    SUndefined(i64),

    #[error("resource ceiling exceeded: {0}")]
    Resource(String),

    #[error("piece LP infeasible with at most {max_turns} turns per piece")]
    InfeasibleAtBound { max_turns: u32 },

    #[error("linear program failure: {0}")]
    Lp(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SclError>;
