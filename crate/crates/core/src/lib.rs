//! Symmetry groups of Schrödinger and diffusion equations
//! `∂ₜψ = k(∂ₓ² − V)ψ` with inverse-quadratic, linear and quadratic potentials.

pub mod action;
pub mod algebra;
pub mod error;
pub mod family;
pub mod group;
pub mod jet;
pub mod multiplier;
pub mod residual;
pub mod scalar;
pub mod smooth;
pub mod solutions;
pub mod suite;

pub use algebra::{DiffOp, GeneratorSet, LaurentPoly2};
pub use error::{Error, Result};
pub use family::{Family, FamilySpec, Point};
pub use group::{compose, inverse, make_element, GroupElement, Mat2};
pub use jet::Jet;
pub use scalar::{re, Scalar, C64};
pub use smooth::{Domain, SmoothFn};
pub use suite::{RunConfig, SuiteReport, Target};
