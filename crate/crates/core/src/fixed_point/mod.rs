//! Contraction fixed points of parametrized maps and their derivatives.
//!
//! The derivative of `u ↦ φ(u)` where `φ(u) = F(u, φ(u))` is
//! `(Id − Q₀)⁻¹ P₀` once `F` admits the development
//! `F(u₀+h, φ₀+z) = F(u₀, φ₀) + P₀h + Q₀z + o(‖h‖ + ‖z‖)` in a weaker norm.
//! Only the second-order case of the higher-derivative recursion is
//! implemented; for `k > 2` the right-hand side `R⁽ᵏ⁾` collects every way of
//! distributing `k` parameter directions over the coefficients `Q⁽ⁱ'ʲ⁾`
//! with `i + j ≤ k`, which this crate does not assemble.

mod derivative;
mod map;
mod solver;
mod taylor;

pub use derivative::{
    implicit_derivative, implicit_derivative_report, neumann_sum, second_derivative_graded,
    solve_resolvent, spectral_norm_estimate, ResolventSolution, NEUMANN_NORM_LIMIT, NEUMANN_TERMS,
    SINGULAR_THRESHOLD,
};
pub use map::{euclidean_norm, sup_norm, ClosureMap, GradedMap, Norm, ParametrizedMap, ScalePair};
pub use solver::{
    continuity_scan, solve_fixed_point, ContinuityRow, FixedPointResult, SolveOptions,
};
pub use taylor::{taylor_residual_scan, TaylorResidualReport, TaylorRow};
