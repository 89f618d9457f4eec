//! Support-function calculus on `S^1` and on axisymmetric `S^2`.
//!
//! A convex body is represented by its support function `h` sampled on a
//! [`SphereGrid`]. Curvature radii are the eigenvalues of
//! `W = ∇²h + h·I`: `h″ + h` on the circle and `(h_θθ + h, h_θ cot θ + h)`
//! for axisymmetric bodies in `R³`.

mod curvature;
mod field;
mod grid;

pub(crate) use curvature::certify_convex;
pub use curvature::{
    boundary_embedding, convexity_margin, curvature_data, elementary_symmetric, is_certified_convex,
    minkowski_combination, radial_from_support, support_derivatives, CurvatureData, SupportDerivatives,
    CONVEXITY_THRESHOLD,
};
pub(crate) use field::fourier_values;
pub use field::{FieldSnapshot, SupportField};
pub use grid::{DerivativeScheme, SphereGrid, MIN_FD_NODES};
