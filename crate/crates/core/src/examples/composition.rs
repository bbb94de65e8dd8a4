use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{second_derivative_rows, SecondDerivativeReport};
use crate::error::{check_dim, Error, Result};
use crate::fixed_point::{GradedMap, ParametrizedMap};
use crate::function_spaces::{cr_value, IntervalBasis, IntervalFunction, IntervalGrid};
use crate::OperatorMatrix;

/// Range slack before `|φ| > 1` is reported.
pub const RANGE_SLACK: f64 = 1e-9;

/// Ball radii of the composition example on `I = [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionMapConfig {
    /// Radius of the invariant ball in `C^{1,1}`.
    pub r: f64,
    /// Radius of the parameter ball in `C^{1,1}`.
    pub r_prime: f64,
    /// Number of equispaced spline nodes.
    pub m: usize,
}

impl Default for CompositionMapConfig {
    fn default() -> Self {
        Self {
            r: 0.5,
            r_prime: 0.2,
            m: 257,
        }
    }
}

impl CompositionMapConfig {
    /// `(1+r)/2`, the `C⁰` bound of `Q_φ` on the ball.
    pub fn q_bound(&self) -> f64 {
        (1.0 + self.r) / 2.0
    }

    /// `max((1+r)/2, (2r+r²)/2)`.
    pub fn contraction_constant(&self) -> f64 {
        let r = self.r;
        self.q_bound().max((2.0 * r + r * r) / 2.0)
    }

    pub fn check(&self) -> Result<()> {
        let (r, rp) = (self.r, self.r_prime);
        let fail = |what: &str| {
            Err(Error::ConfigInfeasible(format!(
                "r = {r}, r' = {rp}: {what}"
            )))
        };
        if !(r > 0.0 && r < 1.0 && rp > 0.0 && rp < 1.0) {
            return fail("radii must lie in (0, 1)");
        }
        if self.m < 8 {
            return fail("need at least 8 nodes");
        }
        if r / 2.0 + rp > r {
            return fail("r/2 + r' > r");
        }
        if r * r / 2.0 + rp > r {
            return fail("r^2/2 + r' > r");
        }
        if r * r / 2.0 * (1.0 + r) + rp > r {
            return fail("(r^2/2)(1+r) + r' > r");
        }
        if self.q_bound() >= 1.0 || (2.0 * r + r * r) / 2.0 >= 1.0 {
            return fail("contraction constant >= 1");
        }
        Ok(())
    }
}

/// `F(u, φ) = ½ φ∘φ + u` on cubic-spline samples.
#[derive(Debug, Clone)]
pub struct CompositionMap {
    cfg: CompositionMapConfig,
    grid: Arc<IntervalGrid>,
}

pub fn composition_map(cfg: CompositionMapConfig) -> Result<CompositionMap> {
    cfg.check()?;
    let grid = IntervalGrid::new(IntervalBasis::CubicSpline, -1.0, 1.0, cfg.m)?;
    Ok(CompositionMap { cfg, grid })
}

impl CompositionMap {
    pub fn config(&self) -> &CompositionMapConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<IntervalGrid> {
        &self.grid
    }

    pub fn function(&self, samples: &[f64]) -> Result<IntervalFunction> {
        IntervalFunction::new(self.grid.clone(), samples.to_vec())
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.grid.nodes().iter().map(|&t| f(t)).collect()
    }

    /// `φ(t_i)` clamped to `I`, with an error past the slack.
    fn arguments(&self, phi: &[f64]) -> Result<Vec<f64>> {
        phi.iter()
            .map(|&v| {
                if v.abs() > 1.0 + RANGE_SLACK {
                    Err(Error::RangeViolation { value: v })
                } else {
                    Ok(v.clamp(-1.0, 1.0))
                }
            })
            .collect()
    }
}

impl ParametrizedMap for CompositionMap {
    fn state_dim(&self) -> usize {
        self.cfg.m
    }

    fn param_dim(&self) -> usize {
        self.cfg.m
    }

    fn apply(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cfg.m, u.len())?;
        let f = self.function(phi)?;
        self.arguments(phi)?
            .iter()
            .zip(u)
            .map(|(&y, ui)| Ok(0.5 * f.eval(y)? + ui))
            .collect()
    }

    fn p_operator(&self, _u: &[f64], _phi: &[f64]) -> Result<OperatorMatrix> {
        Ok(DMatrix::identity(self.cfg.m, self.cfg.m))
    }

    /// `Q z = ½(φ'∘φ·z + z∘φ)`.
    fn q_operator(&self, _u: &[f64], phi: &[f64]) -> Result<OperatorMatrix> {
        let f = self.function(phi)?;
        let m = self.cfg.m;
        let mut q = DMatrix::zeros(m, m);
        for (i, y) in self.arguments(phi)?.into_iter().enumerate() {
            let row = self.grid.row(y, 0)?;
            for (j, w) in row.iter().enumerate() {
                q[(i, j)] = 0.5 * w;
            }
            q[(i, i)] += 0.5 * f.eval_d(y, 1)?;
        }
        Ok(q)
    }
}

impl GradedMap for CompositionMap {
    fn q20(&self, _u: &[f64], _phi: &[f64], _h1: &[f64], _h2: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; self.cfg.m])
    }

    fn q11(&self, _u: &[f64], _phi: &[f64], _h: &[f64], _z: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; self.cfg.m])
    }

    /// `½(φ''∘φ·z·w + z'∘φ·w + w'∘φ·z)`.
    fn q02(&self, _u: &[f64], phi: &[f64], z: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        let f = self.function(phi)?;
        let zf = self.function(z)?;
        let wf = self.function(w)?;
        self.arguments(phi)?
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                Ok(0.5
                    * (f.eval_d(y, 2)? * z[i] * w[i]
                        + zf.eval_d(y, 1)? * w[i]
                        + wf.eval_d(y, 1)? * z[i]))
            })
            .collect()
    }
}

/// `‖f‖_{C^{1,1}}` of spline samples.
pub fn c11_norm(map: &CompositionMap, samples: &[f64]) -> Result<f64> {
    let f = map.function(samples)?;
    cr_value(&f, 2.0, f.len())
}

/// `max(‖f‖_∞, ‖f'‖_∞)` of spline samples.
pub fn c1_norm(map: &CompositionMap, samples: &[f64]) -> Result<f64> {
    let f = map.function(samples)?;
    Ok(f.sup_norm().max(f.differentiate().sup_norm()))
}

/// Smooth random function `Σ_k a_k P_k(t) + Σ_k b_k sin(kπt/2)` with
/// Legendre-like polynomials, scaled to `C^{1,1}` norm `radius·s`, with
/// `s ~ U(0.05, 1]`.
pub fn random_ball_element(
    map: &CompositionMap,
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let raw = map.sample(|t| {
        let poly =
            a[0] + a[1] * t + a[2] * (1.5 * t * t - 0.5) + a[3] * (2.5 * t * t * t - 1.5 * t);
        let trig: f64 = b
            .iter()
            .enumerate()
            .map(|(k, bk)| bk * ((k + 1) as f64 * std::f64::consts::FRAC_PI_2 * t).sin())
            .sum();
        poly + trig
    });
    let norm = c11_norm(map, &raw)?;
    let s: f64 = rng.gen_range(0.05..=1.0);
    Ok(raw.iter().map(|v| v * radius * s / norm).collect())
}

/// Smooth test directions of unit sup norm used for the `C⁰` norm of `Q`.
fn test_directions(map: &CompositionMap) -> Vec<Vec<f64>> {
    let mut out = vec![map.sample(|_| 1.0), map.sample(|t| t)];
    for k in 1..=6 {
        let kf = k as f64 * std::f64::consts::FRAC_PI_2;
        out.push(map.sample(|t| (kf * t).cos()));
        out.push(map.sample(|t| (kf * t).sin()));
    }
    out.push(map.sample(|t| 1.0 - 2.0 * t * t));
    out
}

/// Estimated `C⁰` operator norm of `Q_φ`, `max ‖Q z‖_∞ / ‖z‖_∞` over smooth
/// test directions.
pub fn q_norm_estimate(map: &CompositionMap, phi: &[f64]) -> Result<f64> {
    let q = map.q_operator(&vec![0.0; map.cfg.m], phi)?;
    let mut worst: f64 = 0.0;
    for z in test_directions(map) {
        let zv = nalgebra::DVector::from_column_slice(&z);
        let qz = &q * &zv;
        worst = worst.max(qz.amax() / zv.amax());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSample {
    pub ball_norm: f64,
    pub contraction_ratio: f64,
    pub q_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub samples: Vec<ConstraintSample>,
    pub radius: f64,
    pub contraction_bound: f64,
    pub q_bound: f64,
}

impl ConstraintReport {
    pub fn max_ball_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.ball_norm).fold(0.0, f64::max)
    }

    pub fn max_contraction_ratio(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.contraction_ratio)
            .fold(0.0, f64::max)
    }

    pub fn max_q_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.q_norm).fold(0.0, f64::max)
    }

    /// Ball preservation to `1e−9`, contraction within `k + 0.01` and the
    /// `Q` bound.
    pub fn passes(&self) -> bool {
        self.max_ball_norm() <= self.radius + 1e-9
            && self.max_contraction_ratio() <= self.contraction_bound + 0.01
            && self.max_q_norm() <= self.q_bound + 1e-9
    }
}

/// Ball preservation, contraction constant and `Q` norm on `count` random
/// draws `(u, φ, ψ)` from the parameter and state balls.
pub fn constraint_suite(map: &CompositionMap, count: usize, seed: u64) -> Result<ConstraintReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = map.cfg;
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let u = random_ball_element(map, cfg.r_prime, &mut rng)?;
        let phi = random_ball_element(map, cfg.r, &mut rng)?;
        let psi = random_ball_element(map, cfg.r, &mut rng)?;
        let fphi = map.apply(&u, &phi)?;
        let fpsi = map.apply(&u, &psi)?;
        let num: Vec<f64> = fphi.iter().zip(&fpsi).map(|(a, b)| a - b).collect();
        let den: Vec<f64> = phi.iter().zip(&psi).map(|(a, b)| a - b).collect();
        samples.push(ConstraintSample {
            ball_norm: c11_norm(map, &fphi)?,
            contraction_ratio: c1_norm(map, &num)? / c1_norm(map, &den)?,
            q_norm: q_norm_estimate(map, &phi)?,
        });
    }
    Ok(ConstraintReport {
        samples,
        radius: cfg.r,
        contraction_bound: cfg.contraction_constant(),
        q_bound: cfg.q_bound(),
    })
}

/// `D²φ[h, h]` by the graded-family formula against Richardson second
/// differences (step `1e−2`) for the directions `c` (constant), `c·t` and 0,
/// at `u₀ = 0` and at a non-zero smooth `u₀`.
pub fn composition_second_derivative_check(map: &CompositionMap) -> Result<SecondDerivativeReport> {
    let c = 0.5;
    let bases = [
        ("u0=0", map.sample(|_| 0.0)),
        ("u0=0.05cos(t)", map.sample(|t| 0.05 * t.cos())),
    ];
    let dirs = [
        ("constant", map.sample(|_| c)),
        ("linear", map.sample(|t| c * t)),
        ("zero", map.sample(|_| 0.0)),
    ];
    second_derivative_rows(map, &bases, &dirs, 1e-2, |v| {
        crate::fixed_point::sup_norm(v)
    })
}
