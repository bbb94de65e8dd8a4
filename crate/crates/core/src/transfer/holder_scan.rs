use nalgebra::DVector;
use rayon::prelude::*;

use super::response::TransferProblem;
use crate::error::{check_dim, Error, Result};
use crate::fit::{fit_scan, ScanFit};
use crate::function_spaces::{cr_value, GridFunction};

/// Pair budget per Hölder-norm evaluation, as a multiple of the resolution.
const BUDGET_FACTOR: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderScanRow {
    pub direction: usize,
    pub delta: f64,
    /// `‖(L_{u₀+δe} − L_{u₀})φ‖_{C^{1+β}}` for the fixed test function.
    pub operator_difference: f64,
    /// `‖φ_{u₀+δe} − φ_{u₀}‖_{C^{1+β}}`.
    pub eigenfunction_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderScanReport {
    pub rows: Vec<HolderScanRow>,
    /// Per direction: fits of the operator and eigenfunction differences.
    pub operator_fits: Vec<ScanFit>,
    pub eigenfunction_fits: Vec<ScanFit>,
    /// `γ = α − β`.
    pub gamma: f64,
}

impl HolderScanReport {
    /// Smallest fitted slope over both quantities and all directions.
    pub fn min_slope(&self) -> f64 {
        self.operator_fits
            .iter()
            .chain(&self.eigenfunction_fits)
            .map(|f| f.slope())
            .fold(f64::INFINITY, f64::min)
    }

    /// Every fitted slope is at least `γ − slack`.
    pub fn passes(&self, slack: f64) -> bool {
        self.min_slope() >= self.gamma - slack
    }
}

/// Test function of unit `C^{1+α}` norm.
pub fn unit_test_function(n: usize, alpha: f64) -> Result<GridFunction> {
    use std::f64::consts::PI;
    let f = GridFunction::from_fn(n, |x| {
        1.0 + 0.3 * (2.0 * PI * x).cos() + 0.1 * (4.0 * PI * x).sin()
    })?;
    let norm = cr_value(&f, 1.0 + alpha, BUDGET_FACTOR * n)?;
    Ok(f.map(|v| v / norm))
}

/// Hölder-in-`u` scan of `L_u` and `φ_u` in `C^{1+β}`.
#[allow(clippy::too_many_arguments)]
pub fn holder_scan_operator(
    problem: &TransferProblem,
    u0: &[f64],
    directions: &[Vec<f64>],
    deltas: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<HolderScanReport> {
    if !(0.0 <= beta && beta < alpha && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= beta < alpha < 1, got alpha = {alpha}, beta = {beta}"
        )));
    }
    check_dim(problem.param_dim(), u0.len())?;
    let n = problem.n;
    let budget = BUDGET_FACTOR * n;
    let r = 1.0 + beta;
    let test = unit_test_function(n, alpha)?;
    let tv = DVector::from_column_slice(test.samples());
    let l0 = problem.operator(u0)?;
    let l0_test = &l0 * &tv;
    let data0 = problem.reference_data(u0)?;

    let jobs: Vec<(usize, f64)> = directions
        .iter()
        .enumerate()
        .flat_map(|(i, _)| deltas.iter().map(move |&d| (i, d)))
        .collect();
    let rows: Vec<HolderScanRow> = jobs
        .par_iter()
        .map(|&(i, delta)| {
            let e = &directions[i];
            check_dim(u0.len(), e.len())?;
            let u: Vec<f64> = u0.iter().zip(e).map(|(a, b)| a + delta * b).collect();
            let l = problem.operator(&u)?;
            let dl = GridFunction::new((&l * &tv - &l0_test).as_slice().to_vec())?;
            let phi = problem.data(&u, &data0.ell)?.phi;
            let dphi = phi.zip_with(&data0.phi, |a, b| a - b)?;
            Ok(HolderScanRow {
                direction: i,
                delta,
                operator_difference: cr_value(&dl, r, budget)?,
                eigenfunction_difference: cr_value(&dphi, r, budget)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut operator_fits = Vec::new();
    let mut eigenfunction_fits = Vec::new();
    for i in 0..directions.len() {
        let sel: Vec<&HolderScanRow> = rows.iter().filter(|r| r.direction == i).collect();
        let ds: Vec<f64> = sel.iter().map(|r| r.delta).collect();
        let op: Vec<f64> = sel.iter().map(|r| r.operator_difference).collect();
        let eig: Vec<f64> = sel.iter().map(|r| r.eigenfunction_difference).collect();
        operator_fits.push(fit_scan(&ds, &op)?);
        eigenfunction_fits.push(fit_scan(&ds, &eig)?);
    }
    Ok(HolderScanReport {
        rows,
        operator_fits,
        eigenfunction_fits,
        gamma: alpha - beta,
    })
}
