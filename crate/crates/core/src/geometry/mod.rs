//! Invariant metrics on reductive homogeneous spaces and their curvature.

pub mod json;
mod metrics;
mod modules;
mod ricci;
mod space;

pub use metrics::{
    combine, coordinates, invariant_inner_product, invariant_metric_space, orthonormal_invariant_forms,
    random_invariant_metrics, symmetric_from_upper,
};
pub use modules::{
    decompose_isotropy_modules, find_intertwiners, Equivalence, ModuleBlock, ModuleDecomposition, ModuleSignature,
    SignatureBlock,
};
pub use ricci::{
    einstein_residual, ricci, ricci_flat_isotropy, ricci_form, ricci_in_frame, ricci_operator, ricci_value,
    scalar_curvature,
};
pub use space::{HomogeneousSpace, InvariantMetric, Part};
