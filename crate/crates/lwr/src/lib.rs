//! Loop Weierstrass representation of minimal surfaces in E³ and constant
//! mean curvature one surfaces in H³.
//!
//! A λ-affine potential `ξ = (Aλ + B)dz` is integrated to a frame `Φ` at a
//! finite set of loop parameters; null curves extracted at an evaluation
//! pair `(λ₀, λ₁)` give the immersions.

pub mod error;
pub mod gallery;
pub mod integrator;
pub mod jet;
pub mod liealg;
pub mod potential;
pub mod surface;
pub mod transform;

pub use error::{LwrError, Result};
pub use liealg::{EvaluationPair, Mat2, Mat2C, Spinor2};
