//! Exact mutation calculus for matrix patterns built on totally
//! sign-skew-symmetric integer matrices: seeds with C- and G-matrices,
//! classification of mutation sequences as reddening or greening,
//! conjugation and rotation, and bounded search for maximal green sequences.

pub mod error;
pub mod explorer;
pub mod int;
pub mod intmat;
pub mod pattern;
pub mod seqcalc;
pub mod suite;

pub use error::{Error, Result};
pub use int::Int;
pub use intmat::{ExchangeMatrix, Matrix, Permutation};
pub use pattern::{PatternContext, Seed, SeedPair, Sign};
pub use seqcalc::{MutationSequence, SequenceTrace, SequenceVerdict, VerdictKind};
