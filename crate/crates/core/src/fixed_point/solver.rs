use rayon::prelude::*;

use super::map::{sup_norm, Norm, ParametrizedMap};
use crate::error::{Error, Result};

/// Steps averaged into one increment-ratio window.
const WINDOW: usize = 5;
/// Consecutive non-contracting windows tolerated before giving up.
const MAX_BAD_WINDOWS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    pub phi_star: Vec<f64>,
    pub iterations: usize,
    /// `‖F(u, φ*) − φ*‖_∞`.
    pub residual: f64,
    /// Windowed geometric mean of successive increment ratios; 0 when the
    /// start point was already a fixed point.
    pub contraction_estimate: f64,
}

/// Picard iteration `φ_{n+1} = F(u, φ_n)` until `‖F(u, φ_n) − φ_n‖_∞ ≤ tol`.
///
/// Iterates of maps whose k-th power is a contraction may grow for a few
/// steps, so divergence is only declared after [`MAX_BAD_WINDOWS`]
/// consecutive windows with averaged increment ratio ≥ 1.
pub fn solve_fixed_point<F: ParametrizedMap + ?Sized>(
    map: &F,
    u: &[f64],
    phi0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidArgument(format!(
            "need tol > 0 and max_iter >= 1 (got {tol}, {max_iter})"
        )));
    }
    crate::error::check_dim(map.state_dim(), phi0.len())?;
    crate::error::check_dim(map.param_dim(), u.len())?;

    let mut phi = phi0.to_vec();
    let mut increments: Vec<f64> = Vec::new();
    let mut bad_windows = 0usize;
    let mut last_ratio = 0.0;
    for n in 0..max_iter {
        let next = map.apply(u, &phi)?;
        let inc = sup_norm(
            &next
                .iter()
                .zip(&phi)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        if !inc.is_finite() {
            return Err(Error::NonContraction {
                iterations: n,
                ratio: f64::INFINITY,
            });
        }
        if inc <= tol {
            return Ok(FixedPointResult {
                phi_star: phi,
                iterations: n,
                residual: inc,
                contraction_estimate: last_ratio,
            });
        }
        increments.push(inc);
        let k = increments.len();
        if k > WINDOW {
            let prev = increments[k - 1 - WINDOW];
            let ratio = if prev > 0.0 {
                (inc / prev).powf(1.0 / WINDOW as f64)
            } else {
                f64::INFINITY
            };
            last_ratio = ratio;
            if ratio >= 1.0 {
                bad_windows += 1;
                if bad_windows >= MAX_BAD_WINDOWS {
                    return Err(Error::NonContraction {
                        iterations: n + 1,
                        ratio,
                    });
                }
            } else {
                bad_windows = 0;
            }
        } else if k >= 2 && increments[k - 2] > 0.0 {
            last_ratio = inc / increments[k - 2];
        }
        phi = next;
    }
    let residual = increments.last().copied().unwrap_or(f64::NAN);
    Err(Error::MaxIterExceeded { max_iter, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub direction: usize,
    pub delta: f64,
    pub distance: f64,
}

/// `‖φ(u₀ + δ e) − φ(u₀)‖` for every direction `e` and step `δ`. Entries
/// are solved in parallel and returned in (direction, delta) input order.
pub fn continuity_scan<F: ParametrizedMap + ?Sized>(
    map: &F,
    u0: &[f64],
    phi_start: &[f64],
    directions: &[Vec<f64>],
    deltas: &[f64],
    norm: &Norm,
    opts: SolveOptions,
) -> Result<Vec<ContinuityRow>> {
    let base = solve_fixed_point(map, u0, phi_start, opts.tol, opts.max_iter)?.phi_star;
    let jobs: Vec<(usize, f64)> = directions
        .iter()
        .enumerate()
        .flat_map(|(i, _)| deltas.iter().map(move |&d| (i, d)))
        .collect();
    jobs.par_iter()
        .map(|&(i, delta)| {
            let e = &directions[i];
            crate::error::check_dim(u0.len(), e.len())?;
            let u: Vec<f64> = u0.iter().zip(e).map(|(a, b)| a + delta * b).collect();
            let phi = solve_fixed_point(map, &u, phi_start, opts.tol, opts.max_iter)?.phi_star;
            let diff: Vec<f64> = phi.iter().zip(&base).map(|(a, b)| a - b).collect();
            Ok(ContinuityRow {
                direction: i,
                delta,
                distance: norm(&diff),
            })
        })
        .collect()
}
