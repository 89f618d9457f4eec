//! Numerical laboratory for the Minkowski problem of the k-torsional rigidity.
//!
//! Convex bodies are carried by their support functions on the sphere. The
//! crate solves the interior problem `S_k(D²u) = 1, u|∂Ω = 0`, evaluates the
//! torsional functionals and measure, integrates the normalized curvature
//! flow whose fixed points solve the prescribed-measure equation, and checks
//! the variational identities behind it.

pub mod error;
pub mod flow;
pub mod functionals;
pub mod interior;
pub mod io;
pub mod lab;
pub mod sphere;

pub use error::{Error, Result};

/// Points and vectors; planar bodies use the `z = 0` slice.
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
