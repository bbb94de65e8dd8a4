use nalgebra::DMatrix;

use super::family::{MapFamily, Weight};
use crate::error::{check_dim, Error, Result};
use crate::function_spaces::{interpolation_row, interpolation_rows_with_derivative, node};
use crate::OperatorMatrix;

const NEWTON_STEPS: usize = 50;
const NEWTON_TOL: f64 = 1e-13;

/// The `d` preimages `y_k` of `x` with `T(u, y_k) = x + k`, by Newton
/// iteration seeded at `(x + k)/d`.
pub fn inverse_branches<T: MapFamily + ?Sized>(map: &T, u: &[f64], x: f64) -> Result<Vec<f64>> {
    check_dim(map.param_dim(), u.len())?;
    let d = map.degree();
    (0..d)
        .map(|k| {
            let target = x + k as f64;
            let mut y = target / d as f64;
            let mut residual = map.t(u, y) - target;
            for _ in 0..NEWTON_STEPS {
                if residual.abs() < NEWTON_TOL {
                    return Ok(y);
                }
                y -= residual / map.dtdx(u, y);
                residual = map.t(u, y) - target;
            }
            if residual.abs() < NEWTON_TOL {
                Ok(y)
            } else {
                Err(Error::BranchNewtonFailure {
                    x,
                    branch: k,
                    residual,
                })
            }
        })
        .collect()
}

/// Minimum of `|∂_x T(u, x)|` over the parameter list and `x_resolution`
/// equispaced points.
pub fn check_expanding<T: MapFamily + ?Sized>(
    map: &T,
    u_grid: &[Vec<f64>],
    x_resolution: usize,
) -> Result<f64> {
    if x_resolution == 0 {
        return Err(Error::InvalidArgument(
            "x_resolution must be positive".into(),
        ));
    }
    let mut lambda_min = f64::INFINITY;
    for u in u_grid {
        check_dim(map.param_dim(), u.len())?;
        for j in 0..x_resolution {
            let x = j as f64 / x_resolution as f64;
            let d = map.dtdx(u, x).abs();
            if !(d > 1.0) {
                return Err(Error::NotExpanding {
                    u: u.clone(),
                    x,
                    derivative: d,
                });
            }
            lambda_min = lambda_min.min(d);
        }
    }
    Ok(lambda_min)
}

/// Collocation matrix of `Lφ(x_i) = Σ_{T(u,y) = x_i} g(u, y)·φ(y)`, with `φ`
/// read through its trigonometric interpolant.
pub fn assemble_operator<T: MapFamily + ?Sized>(
    map: &T,
    weight: &Weight,
    u: &[f64],
    n: usize,
) -> Result<OperatorMatrix> {
    weight.check_params(map.param_dim())?;
    assemble_with(map, u, n, |y| {
        let g = weight.value(map, u, y);
        if g > 0.0 {
            Ok(g)
        } else {
            Err(Error::InvalidArgument(format!(
                "weight must be positive, g({y}) = {g}"
            )))
        }
    })
}

fn assemble_with<T, G>(map: &T, u: &[f64], n: usize, weight: G) -> Result<OperatorMatrix>
where
    T: MapFamily + ?Sized,
    G: Fn(f64) -> Result<f64>,
{
    crate::function_spaces::check_resolution(n)?;
    check_dim(map.param_dim(), u.len())?;
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        for y in inverse_branches(map, u, node(n, i))? {
            let g = weight(y)?;
            let row = interpolation_row(n, y);
            for (j, k) in row.iter().enumerate() {
                l[(i, j)] += g * k;
            }
        }
    }
    Ok(l)
}

/// Matrix of `φ ↦ (∂_u L·h)φ`. On each branch `ψ` with
/// `D_uψ·h = −(∂_uT·h)∘ψ / (∂_xT)∘ψ`:
///
/// ```text
/// (∂_u L·h)φ = Σ_ψ [ (∂_u g·h)∘ψ·φ∘ψ + (∂_x g·φ + g·φ')∘ψ · D_uψ·h ]
/// ```
pub fn d_u_operator<T: MapFamily + ?Sized>(
    map: &T,
    weight: &Weight,
    u: &[f64],
    h: &[f64],
    n: usize,
) -> Result<OperatorMatrix> {
    crate::function_spaces::check_resolution(n)?;
    check_dim(map.param_dim(), u.len())?;
    check_dim(map.param_dim(), h.len())?;
    weight.check_params(map.param_dim())?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for y in inverse_branches(map, u, node(n, i))? {
            let jet = weight.jet(map, u, y);
            let tu: f64 = map
                .dtdu(u, y)
                .iter()
                .zip(h)
                .map(|(a, b)| if *b == 0.0 { 0.0 } else { a * b })
                .sum();
            let dpsi = -tu / map.dtdx(u, y);
            let gu: f64 = jet.du.iter().zip(h).map(|(a, b)| a * b).sum();
            let a = gu + jet.dx * dpsi;
            let b = jet.g * dpsi;
            let (row, drow) = interpolation_rows_with_derivative(n, y);
            for j in 0..n {
                m[(i, j)] += a * row[j] + b * drow[j];
            }
        }
    }
    Ok(m)
}

/// `L_u` composed with multiplication by `e^{s·A}` on the nodes.
pub fn twisted_operator(l: &OperatorMatrix, a: &[f64], s: f64) -> Result<OperatorMatrix> {
    check_dim(l.ncols(), a.len())?;
    let mut t = l.clone();
    for (j, aj) in a.iter().enumerate() {
        let f = (s * aj).exp();
        t.column_mut(j).scale_mut(f);
    }
    Ok(t)
}
