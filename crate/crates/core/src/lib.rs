//! Fixed-point differentiation on scales of Banach spaces, applied to
//! weighted transfer operators of expanding circle maps.
//!
//! The crate is organised in four layers:
//!
//! * [`function_spaces`]: periodic grid functions with trigonometric
//!   interpolation, interval functions, and Hölder-norm surrogates.
//! * [`fixed_point`]: contraction solver, the derivative
//!   `D_uφ(u₀) = (Id − Q₀)⁻¹P₀`, Taylor-remainder scans and second
//!   derivatives of graded families.
//! * [`transfer`]: transfer-operator assembly, spectral data, linear
//!   response, Gibbs measures and the pressure identity.
//! * [`examples`]: the nonlinear composition map `½ φ∘φ + u` and the affine
//!   map `½ φ((t+u)/2) + g(t,u)`, each with closed-form oracles.

// `!(x > 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod examples;
pub mod fd;
pub mod fit;
pub mod fixed_point;
pub mod function_spaces;
pub mod transfer;

pub use error::{Error, Result};

/// Dense matrix realizing a linear operator on sample vectors.
pub type OperatorMatrix = nalgebra::DMatrix<f64>;
