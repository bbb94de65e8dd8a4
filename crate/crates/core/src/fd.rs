//! Finite-difference stencils with Richardson extrapolation, used as
//! independent cross-checks of the analytic derivative formulas.

use crate::error::Result;

fn combine(a: &[f64], ca: f64, b: &[f64], cb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| ca * x + cb * y).collect()
}

/// `(f(δ) − f(−δ)) / 2δ` for a vector-valued `f` of a scalar displacement.
pub fn central<F>(f: F, delta: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let p = f(delta)?;
    let m = f(-delta)?;
    Ok(combine(&p, 0.5 / delta, &m, -0.5 / delta))
}

/// Fourth-order first derivative at 0:
/// `[8(f(δ) − f(−δ)) − (f(2δ) − f(−2δ))] / 12δ`.
pub fn richardson_first<F>(f: F, delta: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let p1 = f(delta)?;
    let m1 = f(-delta)?;
    let p2 = f(2.0 * delta)?;
    let m2 = f(-2.0 * delta)?;
    Ok((0..p1.len())
        .map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * delta))
        .collect())
}

pub fn richardson_first_scalar<F>(f: F, delta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    richardson_first(|s| f(s).map(|v| vec![v]), delta).map(|v| v[0])
}

/// `(f(δ) − 2f(0) + f(−δ)) / δ²`.
pub fn second<F>(f: F, delta: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let p = f(delta)?;
    let z = f(0.0)?;
    let m = f(-delta)?;
    let d2 = delta * delta;
    Ok((0..p.len())
        .map(|i| (p[i] - 2.0 * z[i] + m[i]) / d2)
        .collect())
}

/// Second difference extrapolated from steps δ and 2δ: `(4 D(δ) − D(2δ)) / 3`.
pub fn richardson_second<F>(f: F, delta: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let p1 = f(delta)?;
    let z = f(0.0)?;
    let m1 = f(-delta)?;
    let p2 = f(2.0 * delta)?;
    let m2 = f(-2.0 * delta)?;
    let d2 = delta * delta;
    Ok((0..z.len())
        .map(|i| {
            let small = (p1[i] - 2.0 * z[i] + m1[i]) / d2;
            let large = (p2[i] - 2.0 * z[i] + m2[i]) / (4.0 * d2);
            (4.0 * small - large) / 3.0
        })
        .collect())
}
