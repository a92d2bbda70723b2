//! Expansions of real numbers in real bases `q > 1`.
//!
//! The crate computes greedy, quasi-greedy and unique expansions with exact
//! rational arithmetic, decides the lexicographic admissibility conditions
//! that characterise them, tests membership in the closure of the
//! two-dimensional univoque set, and solves Moran equations for the
//! Hausdorff dimension of the associated self-similar digit sets.

pub mod classify;
pub mod cli;
pub mod count;
pub mod dimension;
pub mod error;
pub mod exactnum;
pub mod expand;
pub mod scan;
pub mod sequences;

pub use error::{Error, Result};
pub use exactnum::{make_base, rational_from_decimal, Base, Digit, PointInJ, Rational};
pub use sequences::{EpSeq, Word};
