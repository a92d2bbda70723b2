use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base out of range: {0}")]
    BaseOutOfRange(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("digit {digit} exceeds the largest admissible digit {top}")]
    DigitOutOfRange { digit: u32, top: u32 },

    #[error("x = {x} is outside J_q = [0, {j_max}]")]
    NotInJ { x: String, j_max: String },

    #[error("undecidable at the precision of the approximate base: {0}")]
    UndecidableAtPrecision(String),

    #[error("operation requires an exact rational base")]
    ExactBaseRequired,

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid alpha sequence: {0}")]
    InvalidAlpha(String),

    #[error("invalid alpha period: {0}")]
    InvalidAlphaPeriod(String),

    #[error("the Moran function does not cross 1 on the bracket: {0}")]
    NoRootInBracket(String),

    #[error("base order violated: r = {r} is not below q = {q}")]
    BaseOrderViolation { r: String, q: String },

    #[error("q = {0} is not above the tribonacci constant (or not below 2)")]
    BelowTribonacci(String),

    #[error("the block inequality (1 + q^-n)^k < 1 + q^-(m1+...+mk) fails; grow n: {0}")]
    GrowNRequired(String),

    #[error("invalid block data: {0}")]
    InvalidBlock(String),

    #[error("word is not decomposable into greedy blocks: {0}")]
    NotDecomposable(String),

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
