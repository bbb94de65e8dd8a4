//! Least-squares fits of decay rates and exponents.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("{n} point(s)")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= f64::EPSILON * xs.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        points: n,
    })
}

/// Slope of `log y` against `log x`. Pairs with a non-positive coordinate
/// are skipped.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    fit_linear(&lx, &ly)
}

/// Outcome of fitting `‖difference‖ ~ C δ^s` over a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanFit {
    Fitted(LinearFit),
    /// Every difference is exactly zero: no exponent can be fitted and the
    /// decay is faster than any power.
    Vanishing,
}

impl ScanFit {
    pub fn slope(&self) -> f64 {
        match self {
            ScanFit::Fitted(f) => f.slope,
            ScanFit::Vanishing => f64::INFINITY,
        }
    }
}

pub fn fit_scan(deltas: &[f64], values: &[f64]) -> Result<ScanFit> {
    let abs: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
    let distinct = abs.iter().any(|d| (d - abs[0]).abs() > 0.0);
    if abs.len() < 2 || !distinct {
        return Err(Error::DegenerateFit(
            "need at least two distinct step sizes".into(),
        ));
    }
    if values.iter().all(|v| *v == 0.0) {
        return Ok(ScanFit::Vanishing);
    }
    fit_loglog(&abs, values).map(ScanFit::Fitted)
}
