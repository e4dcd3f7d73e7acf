use thiserror::Error;

use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank must be between 2 and 26, got {0}")]
    InvalidRank(usize),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("word {word} is not freely reduced")]
    NotReduced { word: String },

    #[error("word {word} uses a generator outside the rank-{rank} alphabet")]
    AlphabetMismatch { word: String, rank: usize },

    #[error("alphabets differ: rank {left} vs rank {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("inverse check failed at generator {generator}: round trip gives {got}")]
    NotInverse { generator: char, got: Word },

    #[error("generator {generator} has an empty image")]
    EmptyImage { generator: char },

    #[error("cannot trim {amount} letters from a word of length {len}")]
    TrimTooLong { amount: usize, len: usize },

    #[error("depth {depth} is smaller than the longest word ({longest})")]
    DepthTooSmall { depth: usize, longest: usize },

    #[error("double cylinder needs two distinct words, got [{0}, {0}]")]
    DegeneratePair(Word),

    #[error("enumeration budget exceeded: {what} needs more than {limit} steps")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
