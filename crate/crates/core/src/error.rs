use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("degree must be positive")]
    ZeroDegree,

    #[error("not a permutation of 0..{n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },

    #[error("partial map is not injective: value {value} hit twice")]
    NotInjective { value: usize },

    #[error("index {index} out of range for degree {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("degree {requested} exceeds the maximum degree {max}")]
    DegreeOverflow { requested: u128, max: usize },

    #[error("word is not reduced at letter {position}")]
    NotReduced { position: usize },

    #[error("generator x{index} used but tuple has only {k} generators")]
    GeneratorOutOfRange { index: usize, k: usize },

    #[error("a generator tuple needs at least one permutation")]
    EmptyTuple,

    #[error("tuple length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what}: degree {n} is over the limit {limit}")]
    OverLimit { what: &'static str, n: usize, limit: usize },

    #[error("{what}: needs {needed} steps, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("degree {n} is not divisible by {by}")]
    NotDivisible { n: usize, by: usize },

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("subset is not invariant: boundary mass {boundary}")]
    NotInvariant { boundary: String },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: no success after {tries} tries")]
    TriesExhausted { what: &'static str, tries: usize },
}

impl Error {
    pub(crate) fn mismatch(left: usize, right: usize) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::DegreeMismatch { left, right })
        }
    }
}
