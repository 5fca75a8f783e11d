//! Free-group words, automorphisms and the Artin action of braid groups.
//!
//! Convention: `σ_i` acts by `x_i ↦ x_i x_{i+1} x_i⁻¹`, `x_{i+1} ↦ x_i`, all
//! other generators fixed. The action is faithful, so two braid words are
//! equal in `B_n` exactly when their Artin images agree on every generator.

mod aut;
mod braid;
mod word;

use thiserror::Error;

pub use aut::FreeAut;
pub use braid::{artin, braid_equal, braid_stats, find_cyclic_match, BraidStats, BraidWord};
pub use word::{Word, MAX_WORD_LEN};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WordsError {
    #[error("invalid letter {0}")]
    Letter(i32),
    #[error("word exceeds {0} letters")]
    TooLong(usize),
    #[error("rank mismatch: expected {expected}, got {got}")]
    Rank { expected: usize, got: usize },
    #[error("claimed inverse does not invert the map")]
    NotInvertible,
    #[error("braid letter {letter} out of range for {strands} strands")]
    BraidIndex { letter: i32, strands: usize },
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("braid parse error: {0}")]
    Parse(String),
}
