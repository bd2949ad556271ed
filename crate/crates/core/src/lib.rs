//! Exact bounds, witness polynomials and extremal search for few-distance
//! sets in boxes `A_1 × … × A_n` with `|A_i| = q`.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod geometry;

pub use error::{Error, Result};
pub mod poly;
pub mod search;
pub mod witness;
