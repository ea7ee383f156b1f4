//! Lie algebras, representations and semidirect products.

mod algebra;
pub mod json;
mod repr;

pub use algebra::LieAlgebra;
pub use repr::{semidirect, Representation, SemidirectProduct, Subalgebra};
