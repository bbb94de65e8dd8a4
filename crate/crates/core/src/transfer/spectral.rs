use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::function_spaces::{DualFunctional, GridFunction};
use crate::OperatorMatrix;

pub const POWER_TOL: f64 = 1e-13;
pub const POWER_MAX_ITER: usize = 10_000;
/// Power steps used for the subdominant ratio.
pub const SIGMA_STEPS: usize = 20;

/// Leading eigendata `L = λΠ + R` of a positive operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub lambda: f64,
    pub phi: GridFunction,
    pub ell: DualFunctional,
    pub pi: OperatorMatrix,
    pub r: OperatorMatrix,
    /// `(‖Rᵐv‖/‖v‖)^{1/m}/λ` at `m = 20`, maximized over a few `v ∈ ker ℓ`.
    pub sigma_estimate: f64,
    pub iterations: usize,
}

/// Normalized power iteration from the constant vector. Returns the
/// eigenvalue estimate, the unit-sup eigenvector and the iteration count.
pub fn power_iteration(
    l: &OperatorMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, DVector<f64>, usize)> {
    let n = l.nrows();
    check_dim(n, l.ncols())?;
    let mut v = DVector::from_element(n, 1.0);
    for it in 1..=max_iter {
        let w = l * &v;
        let scale = w.amax();
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::NonPositiveEigenfunction);
        }
        // keep the sign of the cone
        let sign = if w.sum() < 0.0 { -1.0 } else { 1.0 };
        let next = w * (sign / scale);
        let change = (&next - &v).amax();
        v = next;
        if change < tol {
            let lv = l * &v;
            let lambda = lv.dot(&v) / v.dot(&v);
            return Ok((lambda, v, it));
        }
    }
    Err(Error::PowerIterationStalled {
        iterations: max_iter,
    })
}

/// Leading eigenvalue only.
pub fn leading_eigenvalue(l: &OperatorMatrix, tol: f64) -> Result<f64> {
    power_iteration(l, tol, POWER_MAX_ITER).map(|(lambda, _, _)| lambda)
}

/// Spectral data with `⟨ell_ref, φ⟩ = 1` and `⟨ℓ, φ⟩ = 1`.
///
/// `tol` is the relative-change threshold of the power iterations; the gap
/// check fails when `sigma_estimate ≥ 1 − tol`.
pub fn spectral_data(
    l: &OperatorMatrix,
    ell_ref: &DualFunctional,
    tol: f64,
) -> Result<SpectralData> {
    let n = l.nrows();
    check_dim(n, ell_ref.resolution())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let (lambda, v, it_r) = power_iteration(l, tol, POWER_MAX_ITER)?;
    let lt = l.transpose();
    let (lambda_adj, w, it_l) = power_iteration(&lt, tol, POWER_MAX_ITER)?;
    if !(lambda > 0.0) || (lambda - lambda_adj).abs() > 1e-8 * lambda.abs() {
        return Err(Error::NonPositiveEigenfunction);
    }
    if v.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::NonPositiveEigenfunction);
    }
    let ref_pair = ell_ref.pair_samples(v.as_slice());
    if ref_pair.abs() < 1e-300 {
        return Err(Error::NormalizationVanishes { value: ref_pair });
    }
    let phi = v / ref_pair;
    let pair = w.dot(&phi);
    if pair.abs() < 1e-300 {
        return Err(Error::NormalizationVanishes { value: pair });
    }
    let ell = w / pair;
    let pi = &phi * ell.transpose();
    let r = l - &pi * lambda;
    let sigma_estimate = sigma_estimate(&r, &pi, lambda);
    if sigma_estimate >= 1.0 - tol {
        return Err(Error::NoSpectralGap {
            sigma: sigma_estimate,
        });
    }
    Ok(SpectralData {
        lambda,
        phi: GridFunction::new(phi.as_slice().to_vec())?,
        ell: DualFunctional::new(ell.as_slice().to_vec())?,
        pi,
        r,
        sigma_estimate,
        iterations: it_r.max(it_l),
    })
}

/// Spectral data normalized against Lebesgue measure; its `ell` is the
/// reference functional for the other parameter values.
pub fn reference_spectral_data(l: &OperatorMatrix, tol: f64) -> Result<SpectralData> {
    spectral_data(l, &DualFunctional::lebesgue(l.nrows())?, tol)
}

fn sigma_estimate(r: &OperatorMatrix, pi: &OperatorMatrix, lambda: f64) -> f64 {
    let n = r.nrows();
    let proj = DMatrix::identity(n, n) - pi;
    let mut worst: f64 = 0.0;
    for k in 1..=3usize {
        let e = DVector::from_fn(n, |j, _| {
            let x = j as f64 / n as f64;
            (2.0 * std::f64::consts::PI * k as f64 * x + 0.3 * k as f64).cos()
                + 0.25 * (j % (k + 2)) as f64
        });
        let mut v = &proj * e;
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        v /= n0;
        let mut log_growth = 0.0;
        let mut vanished = false;
        for _ in 0..SIGMA_STEPS {
            v = r * v;
            let nv = v.norm();
            if nv == 0.0 {
                vanished = true;
                break;
            }
            log_growth += nv.ln();
            v /= nv;
        }
        if !vanished {
            worst = worst.max((log_growth / SIGMA_STEPS as f64).exp() / lambda);
        }
    }
    worst
}

/// `m(f) = ⟨ℓ, f·φ⟩`.
pub fn gibbs_measure(data: &SpectralData, f: &GridFunction) -> Result<f64> {
    check_dim(data.phi.resolution(), f.resolution())?;
    Ok(data
        .ell
        .weights()
        .iter()
        .zip(data.phi.samples())
        .zip(f.samples())
        .map(|((w, p), a)| w * p * a)
        .sum())
}

/// `‖λ⁻ⁿRⁿφ‖` for `n = 1..=steps` under `norm`.
pub fn decay_sequence(
    data: &SpectralData,
    phi: &[f64],
    steps: usize,
    norm: impl Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    check_dim(data.r.ncols(), phi.len())?;
    let scaled = &data.r / data.lambda;
    let mut v = DVector::from_column_slice(phi);
    Ok((0..steps)
        .map(|_| {
            v = &scaled * &v;
            norm(v.as_slice())
        })
        .collect())
}
