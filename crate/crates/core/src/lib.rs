//! Constructions, oracle protocols and structural checks for constant-cost
//! communication problems.

pub mod acceptance;
pub mod bits;
pub mod domino;
pub mod error;
pub mod matrix;
pub mod problems;
pub mod protocol;
pub mod ramsey;
pub mod reduction;
pub mod structure;

pub use bits::BitString;
pub use error::{Error, Result};
pub use matrix::{BitMatrix, PartialMatrix};
