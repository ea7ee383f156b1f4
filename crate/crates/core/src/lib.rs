//! Curvature of invariant metrics on homogeneous spaces.
//!
//! Lie algebras are stored as dense structure constants over an exact
//! rational or floating-point backend. On top of that sit Ricci curvature of
//! invariant metrics, isotropy-module analysis, the generalized Einstein
//! equation for `u ⋉ n`, a catalog of low-dimensional non-compact homogeneous
//! spaces with verification recipes, and a multi-start Einstein metric search.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod matrix;
pub mod parallel;
pub mod policy;
pub mod scalar;
pub mod search;
pub mod structure;

pub mod catalog;
pub mod lie;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use parallel::ExecutionMode;
pub use policy::{policy, NumericPolicy};
pub use scalar::{rat, Dual, RealScalar, Rational, Scalar};
