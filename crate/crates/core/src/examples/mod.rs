//! Two self-contained fixed-point problems on `I = [−1, 1]` with
//! closed-form or series oracles: the nonlinear composition map
//! `F(u, φ) = ½ φ∘φ + u` and the affine map `F(u, φ)(t) = ½ φ((t+u)/2) + g(t, u)`.

mod affine;
mod composition;

pub use affine::{
    affine_contraction_ratio, affine_holder_experiment, affine_map, affine_second_derivative_check,
    series_oracle, AffineForcing, AffineMap, AffineMapConfig, HolderExperiment,
    HolderExperimentRow,
};
pub use composition::{
    c11_norm, c1_norm, composition_map, composition_second_derivative_check, constraint_suite,
    q_norm_estimate, random_ball_element, CompositionMap, CompositionMapConfig, ConstraintReport,
    ConstraintSample, RANGE_SLACK,
};

use crate::error::Result;
use crate::fd::richardson_second;
use crate::fixed_point::{second_derivative_graded, solve_fixed_point, GradedMap, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivativeRow {
    pub base: String,
    pub direction: String,
    pub engine_norm: f64,
    pub fd_norm: f64,
    pub abs_error: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivativeReport {
    pub rows: Vec<SecondDerivativeRow>,
}

impl SecondDerivativeReport {
    /// Relative error below `rel_tol` where the difference quotient is
    /// non-negligible, absolute error below `abs_tol` elsewhere.
    pub fn passes(&self, rel_tol: f64, abs_tol: f64) -> bool {
        self.rows.iter().all(|r| {
            if r.fd_norm > abs_tol {
                r.relative_error < rel_tol
            } else {
                r.abs_error < abs_tol
            }
        })
    }

    pub fn max_relative_error(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.fd_norm > 0.0)
            .map(|r| r.relative_error)
            .fold(0.0, f64::max)
    }
}

/// Engine second derivative `D²φ[h, h]` against Richardson second
/// differences of the solved fixed point, for each base point and direction.
pub(crate) fn second_derivative_rows<F: GradedMap>(
    map: &F,
    bases: &[(&str, Vec<f64>)],
    directions: &[(&str, Vec<f64>)],
    delta: f64,
    norm: impl Fn(&[f64]) -> f64,
) -> Result<SecondDerivativeReport> {
    let opts = SolveOptions {
        tol: 1e-14,
        max_iter: 10_000,
    };
    let mut rows = Vec::new();
    for (bname, u0) in bases {
        let phi0 = solve_fixed_point(
            map,
            u0,
            &vec![0.0; map.state_dim()],
            opts.tol,
            opts.max_iter,
        )?
        .phi_star;
        for (dname, h) in directions {
            let engine = second_derivative_graded(map, u0, &phi0, h, h)?;
            let fd = richardson_second(
                |s| {
                    let u: Vec<f64> = u0.iter().zip(h).map(|(a, b)| a + s * b).collect();
                    Ok(solve_fixed_point(map, &u, &phi0, opts.tol, opts.max_iter)?.phi_star)
                },
                delta,
            )?;
            let diff: Vec<f64> = engine.iter().zip(&fd).map(|(a, b)| a - b).collect();
            let fd_norm = norm(&fd);
            let abs_error = norm(&diff);
            rows.push(SecondDerivativeRow {
                base: bname.to_string(),
                direction: dname.to_string(),
                engine_norm: norm(&engine),
                fd_norm,
                abs_error,
                relative_error: if fd_norm > 0.0 {
                    abs_error / fd_norm
                } else {
                    abs_error
                },
            });
        }
    }
    Ok(SecondDerivativeReport { rows })
}
