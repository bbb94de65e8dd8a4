use std::sync::Arc;

use nalgebra::DMatrix;

use super::{second_derivative_rows, SecondDerivativeReport};
use crate::error::{check_dim, Error, Result};
use crate::fit::{fit_scan, ScanFit};
use crate::fixed_point::{solve_fixed_point, sup_norm, GradedMap, ParametrizedMap};
use crate::function_spaces::{
    cr_value, holder_seminorm, IntervalBasis, IntervalFunction, IntervalGrid,
};
use crate::OperatorMatrix;

/// Terms of the truncated series oracle.
pub const SERIES_TERMS: usize = 60;

/// Forcing term `g(t, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffineForcing {
    /// `g ≡ c`.
    Constant(f64),
    /// `amplitude·|u|^α·cos(t)`, exactly α-Hölder in `u` at 0.
    Holder { amplitude: f64 },
    /// `amplitude·(cos(t) + u·sin(t))`, linear in `u`.
    Lipschitz { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMapConfig {
    pub forcing: AffineForcing,
    /// Parameter box `[−ε, ε]`.
    pub epsilon: f64,
    /// Hölder exponent of the state space and of the Hölder forcing.
    pub alpha: f64,
    /// Chebyshev–Lobatto nodes on `[−1, 1]`.
    pub m: usize,
}

impl Default for AffineMapConfig {
    fn default() -> Self {
        Self {
            forcing: AffineForcing::Lipschitz { amplitude: 0.2 },
            epsilon: 0.5,
            alpha: 0.5,
            m: 33,
        }
    }
}

impl AffineMapConfig {
    pub fn g(&self, t: f64, u: f64) -> f64 {
        match self.forcing {
            AffineForcing::Constant(c) => c,
            AffineForcing::Holder { amplitude } => amplitude * u.abs().powf(self.alpha) * t.cos(),
            AffineForcing::Lipschitz { amplitude } => amplitude * (t.cos() + u * t.sin()),
        }
    }

    fn g_u(&self, t: f64, u: f64) -> Result<f64> {
        match self.forcing {
            AffineForcing::Constant(_) => Ok(0.0),
            AffineForcing::Lipschitz { amplitude } => Ok(amplitude * t.sin()),
            AffineForcing::Holder { amplitude } => {
                if u == 0.0 {
                    Err(Error::InvalidArgument(
                        "Hölder forcing is not differentiable at u = 0".into(),
                    ))
                } else {
                    Ok(amplitude
                        * self.alpha
                        * u.abs().powf(self.alpha - 1.0)
                        * u.signum()
                        * t.cos())
                }
            }
        }
    }

    fn g_uu(&self, t: f64, u: f64) -> Result<f64> {
        match self.forcing {
            AffineForcing::Constant(_) | AffineForcing::Lipschitz { .. } => Ok(0.0),
            AffineForcing::Holder { amplitude } => {
                if u == 0.0 {
                    Err(Error::InvalidArgument(
                        "Hölder forcing is not differentiable at u = 0".into(),
                    ))
                } else {
                    let a = self.alpha;
                    Ok(amplitude * a * (a - 1.0) * u.abs().powf(a - 2.0) * t.cos())
                }
            }
        }
    }
}

/// `F(u, φ)(t) = ½ φ((t+u)/2) + g(t, u)` on Chebyshev samples.
#[derive(Debug, Clone)]
pub struct AffineMap {
    cfg: AffineMapConfig,
    grid: Arc<IntervalGrid>,
}

/// The affine map; checks `‖g(·, u)‖_{C^α} ≤ ½` on five points of the box.
pub fn affine_map(cfg: AffineMapConfig) -> Result<AffineMap> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::ConfigInfeasible(format!(
            "epsilon = {} must lie in (0, 1)",
            cfg.epsilon
        )));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::ConfigInfeasible(format!(
            "alpha = {} must lie in (0, 1)",
            cfg.alpha
        )));
    }
    let grid = IntervalGrid::new(IntervalBasis::Chebyshev, -1.0, 1.0, cfg.m)?;
    for k in -2..=2 {
        let u = cfg.epsilon * k as f64 / 2.0;
        let g = IntervalFunction::from_fn(&grid, |t| cfg.g(t, u))?;
        let norm = cr_value(&g, cfg.alpha, 4 * cfg.m)?;
        if norm > 0.5 {
            return Err(Error::ConfigInfeasible(format!(
                "||g(., {u})||_C^{} = {norm} exceeds 1/2",
                cfg.alpha
            )));
        }
    }
    Ok(AffineMap { cfg, grid })
}

impl AffineMap {
    pub fn config(&self) -> &AffineMapConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<IntervalGrid> {
        &self.grid
    }

    pub fn function(&self, samples: &[f64]) -> Result<IntervalFunction> {
        IntervalFunction::new(self.grid.clone(), samples.to_vec())
    }

    fn param(&self, u: &[f64]) -> Result<f64> {
        check_dim(1, u.len())?;
        let u = u[0];
        if u.abs() > self.cfg.epsilon {
            return Err(Error::InvalidArgument(format!(
                "parameter {u} outside [-{0}, {0}]",
                self.cfg.epsilon
            )));
        }
        Ok(u)
    }

    fn midpoints(&self, u: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.nodes().iter().map(move |&t| (t, 0.5 * (t + u)))
    }
}

impl ParametrizedMap for AffineMap {
    fn state_dim(&self) -> usize {
        self.cfg.m
    }

    fn param_dim(&self) -> usize {
        1
    }

    fn apply(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        let u = self.param(u)?;
        let f = self.function(phi)?;
        self.midpoints(u)
            .map(|(t, s)| Ok(0.5 * f.eval(s)? + self.cfg.g(t, u)))
            .collect()
    }

    /// `¼ φ'((t+u)/2) + ∂_u g(t, u)`.
    fn p_operator(&self, u: &[f64], phi: &[f64]) -> Result<OperatorMatrix> {
        let u = self.param(u)?;
        let f = self.function(phi)?;
        let col: Vec<f64> = self
            .midpoints(u)
            .map(|(t, s)| Ok(0.25 * f.eval_d(s, 1)? + self.cfg.g_u(t, u)?))
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_column_slice(self.cfg.m, 1, &col))
    }

    /// `Q z = ½ z((t+u)/2)`.
    fn q_operator(&self, u: &[f64], _phi: &[f64]) -> Result<OperatorMatrix> {
        let u = self.param(u)?;
        let m = self.cfg.m;
        let mut q = DMatrix::zeros(m, m);
        for (i, (_, s)) in self.midpoints(u).enumerate() {
            for (j, w) in self.grid.row(s, 0)?.iter().enumerate() {
                q[(i, j)] = 0.5 * w;
            }
        }
        Ok(q)
    }
}

impl GradedMap for AffineMap {
    /// `(⅛ φ''((t+u)/2) + ∂²_u g)·h1·h2`.
    fn q20(&self, u: &[f64], phi: &[f64], h1: &[f64], h2: &[f64]) -> Result<Vec<f64>> {
        check_dim(1, h1.len())?;
        check_dim(1, h2.len())?;
        let u = self.param(u)?;
        let f = self.function(phi)?;
        let hh = h1[0] * h2[0];
        self.midpoints(u)
            .map(|(t, s)| Ok(hh * (0.125 * f.eval_d(s, 2)? + self.cfg.g_uu(t, u)?)))
            .collect()
    }

    /// `¼ h·z'((t+u)/2)`.
    fn q11(&self, u: &[f64], _phi: &[f64], h: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        check_dim(1, h.len())?;
        let u = self.param(u)?;
        let zf = self.function(z)?;
        self.midpoints(u)
            .map(|(_, s)| Ok(0.25 * h[0] * zf.eval_d(s, 1)?))
            .collect()
    }

    fn q02(&self, _u: &[f64], _phi: &[f64], _z: &[f64], _w: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; self.cfg.m])
    }
}

/// `φ_u(t) = Σ_{n<60} 2⁻ⁿ g(t_n, u)`, `t₀ = t`, `t_{n+1} = (t_n + u)/2`.
pub fn series_oracle(cfg: &AffineMapConfig, t: f64, u: f64) -> f64 {
    let mut tn = t;
    let mut scale = 1.0;
    let mut acc = 0.0;
    for _ in 0..SERIES_TERMS {
        acc += scale * cfg.g(tn, u);
        tn = 0.5 * (tn + u);
        scale *= 0.5;
    }
    acc
}

/// `[F(u,φ) − F(u,ψ)]_α / [φ − ψ]_α` with sampled seminorms.
pub fn affine_contraction_ratio(map: &AffineMap, u: f64, phi: &[f64], psi: &[f64]) -> Result<f64> {
    let fphi = map.apply(&[u], phi)?;
    let fpsi = map.apply(&[u], psi)?;
    let num: Vec<f64> = fphi.iter().zip(&fpsi).map(|(a, b)| a - b).collect();
    let den: Vec<f64> = phi.iter().zip(psi).map(|(a, b)| a - b).collect();
    let budget = 4 * map.cfg.m;
    let n = holder_seminorm(&map.function(&num)?, map.cfg.alpha, budget)?;
    let d = holder_seminorm(&map.function(&den)?, map.cfg.alpha, budget)?;
    if d == 0.0 {
        return Err(Error::InvalidArgument("phi - psi has zero seminorm".into()));
    }
    Ok(n / d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderExperimentRow {
    pub delta: f64,
    /// `‖φ_δ − φ_0‖_{C⁰}`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderExperiment {
    pub rows: Vec<HolderExperimentRow>,
    pub fit: ScanFit,
}

impl HolderExperiment {
    pub fn slope(&self) -> f64 {
        self.fit.slope()
    }
}

/// Log-log slope of `δ ↦ ‖φ_δ − φ_0‖_{C⁰}`.
pub fn affine_holder_experiment(cfg: AffineMapConfig, deltas: &[f64]) -> Result<HolderExperiment> {
    let map = affine_map(cfg)?;
    let zero = vec![0.0; cfg.m];
    let solve = |u: f64| solve_fixed_point(&map, &[u], &zero, 1e-15, 10_000).map(|r| r.phi_star);
    let base = solve(0.0)?;
    let rows: Vec<HolderExperimentRow> = deltas
        .iter()
        .map(|&delta| {
            let phi = solve(delta)?;
            let diff: Vec<f64> = phi.iter().zip(&base).map(|(a, b)| a - b).collect();
            Ok(HolderExperimentRow {
                delta,
                distance: sup_norm(&diff),
            })
        })
        .collect::<Result<_>>()?;
    let ds: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let dist: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    let fit = fit_scan(&ds, &dist)?;
    Ok(HolderExperiment { rows, fit })
}

/// Second derivative along `h = 1` at `u₀ ∈ {0, 0.2}` against Richardson
/// second differences with step `1e−2`.
pub fn affine_second_derivative_check(map: &AffineMap) -> Result<SecondDerivativeReport> {
    let bases = [("u0=0", vec![0.0]), ("u0=0.2", vec![0.2])];
    let dirs = [("unit", vec![1.0])];
    second_derivative_rows(map, &bases, &dirs, 1e-2, sup_norm)
}
