use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix {matrix}: entry ({row}, {col}) is not strictly positive")]
    NonPositiveEntry {
        matrix: usize,
        row: usize,
        col: usize,
    },

    #[error("matrix {matrix} is singular")]
    SingularMatrix { matrix: usize },

    #[error("bad probability vector: {0}")]
    BadProbabilityVector(String),

    #[error("cannot parse {0:?} as an exact decimal or p/q rational")]
    InvalidNumber(String),

    #[error("enumerating {words} words exceeds the word cap of {cap}")]
    BudgetExceeded { words: u128, cap: u64 },

    #[error("composition oracle supports n <= 8, got n = {0}")]
    OracleTooLarge(u32),

    #[error("denominator of the level-{0} estimate vanishes at working precision")]
    DegenerateDenominator(u32),

    #[error("series term ratio does not contract at n = {0}")]
    RatioNotContracting(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
