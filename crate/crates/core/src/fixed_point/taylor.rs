use nalgebra::DVector;
use rayon::prelude::*;

use super::map::{sup_norm, Norm, ParametrizedMap};
use super::solver::{solve_fixed_point, SolveOptions};
use crate::error::{check_dim, Error, Result};
use crate::fit::{fit_scan, ScanFit};
use crate::OperatorMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorRow {
    pub delta: f64,
    /// Sup norm of the parameter increment `h = δ·e`.
    pub h_norm: f64,
    /// Coarse norm of `z = φ(u₀+h) − φ(u₀)`.
    pub z_norm: f64,
    pub residual_norm: f64,
    /// `residual / (h_norm + z_norm)`.
    pub normalized_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorResidualReport {
    pub rows: Vec<TaylorRow>,
    /// Log-log slope of the residual against `h_norm`; `None` when every
    /// residual vanishes identically (exact development).
    pub fitted_order: Option<f64>,
    /// Same slope against `z_norm`.
    pub fitted_order_z: Option<f64>,
}

fn fitted(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    Ok(match fit_scan(xs, ys)? {
        ScanFit::Fitted(f) => Some(f.slope),
        ScanFit::Vanishing => None,
    })
}

/// Remainder of the first-order development at the fixed point,
/// `‖F(u₀+h, φ₀+z) − F(u₀, φ₀) − P₀h − Q₀z‖_coarse`, along the curve
/// `z = φ(u₀+h) − φ(u₀)`.
#[allow(clippy::too_many_arguments)]
pub fn taylor_residual_scan<F: ParametrizedMap + ?Sized>(
    map: &F,
    u0: &[f64],
    phi0: &[f64],
    p0: &OperatorMatrix,
    q0: &OperatorMatrix,
    h_direction: &[f64],
    deltas: &[f64],
    coarse_norm: &Norm,
    opts: SolveOptions,
) -> Result<TaylorResidualReport> {
    check_dim(map.param_dim(), u0.len())?;
    check_dim(map.param_dim(), h_direction.len())?;
    check_dim(map.state_dim(), phi0.len())?;
    if deltas.windows(2).any(|w| w[1].abs() > w[0].abs()) {
        return Err(Error::InvalidArgument("deltas must be decreasing".into()));
    }
    let f0 = map.apply(u0, phi0)?;
    let rows: Vec<TaylorRow> = deltas
        .par_iter()
        .map(|&delta| {
            let h: Vec<f64> = h_direction.iter().map(|e| delta * e).collect();
            let u: Vec<f64> = u0.iter().zip(&h).map(|(a, b)| a + b).collect();
            let phi = solve_fixed_point(map, &u, phi0, opts.tol, opts.max_iter)?.phi_star;
            let z: Vec<f64> = phi.iter().zip(phi0).map(|(a, b)| a - b).collect();
            let f1 = map.apply(&u, &phi)?;
            let lin = p0 * DVector::from_column_slice(&h) + q0 * DVector::from_column_slice(&z);
            let rem: Vec<f64> = (0..f1.len()).map(|i| f1[i] - f0[i] - lin[i]).collect();
            let h_norm = sup_norm(&h);
            let z_norm = coarse_norm(&z);
            let residual_norm = coarse_norm(&rem);
            let denom = h_norm + z_norm;
            Ok(TaylorRow {
                delta,
                h_norm,
                z_norm,
                residual_norm,
                normalized_residual: if denom > 0.0 {
                    residual_norm / denom
                } else {
                    0.0
                },
            })
        })
        .collect::<Result<_>>()?;
    let hs: Vec<f64> = rows.iter().map(|r| r.h_norm).collect();
    let zs: Vec<f64> = rows.iter().map(|r| r.z_norm).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.residual_norm).collect();
    let fitted_order = fitted(&hs, &res)?;
    let fitted_order_z = if zs.iter().any(|z| *z > 0.0) && zs.iter().any(|z| *z != zs[0]) {
        fitted(&zs, &res)?
    } else {
        None
    };
    Ok(TaylorResidualReport {
        rows,
        fitted_order,
        fitted_order_z,
    })
}
