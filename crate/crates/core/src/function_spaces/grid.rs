//! Periodic functions on the circle ℝ/ℤ sampled on `N` equispaced nodes.
//!
//! The continuous object behind a [`GridFunction`] is its trigonometric
//! interpolant with a symmetric Nyquist term,
//!
//! ```text
//! p(x) = Σ_j f_j K(x - x_j),   K(t) = sin(Nπt) cot(πt) / N,   x_j = j / N,
//! ```
//!
//! which reproduces every trigonometric polynomial of degree < N/2 exactly.
//! Point evaluation, derivatives at arbitrary points and the interpolation
//! rows used to assemble operator matrices all go through the same kernel,
//! so matrices and pointwise evaluations agree to rounding.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this value of |sin(πt)| the closed-form kernel loses digits and the
/// cosine sum is used instead.
const NEAR_NODE: f64 = 1e-3;

/// Node `j` of the `n`-point grid.
#[inline]
pub fn node(n: usize, j: usize) -> f64 {
    j as f64 / n as f64
}

pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| node(n, j)).collect()
}

/// Flat distance on ℝ/ℤ.
#[inline]
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

pub(crate) fn check_resolution(n: usize) -> Result<()> {
    if n >= 8 && n.is_multiple_of(2) {
        Ok(())
    } else {
        Err(Error::InvalidResolution(n))
    }
}

fn kernel_by_sum(n: usize, t: f64) -> (f64, f64) {
    let m = n / 2;
    let nf = n as f64;
    let mut k = 1.0;
    let mut dk = 0.0;
    for q in 1..m {
        let arg = 2.0 * PI * q as f64 * t;
        k += 2.0 * arg.cos();
        dk -= 4.0 * PI * q as f64 * arg.sin();
    }
    let arg = 2.0 * PI * m as f64 * t;
    k += arg.cos();
    dk -= 2.0 * PI * m as f64 * arg.sin();
    (k / nf, dk / nf)
}

/// Interpolation weights `K(x - x_j)` and, when `dweights` is given, their
/// x-derivatives `K'(x - x_j)`.
pub(crate) fn kernel_row(n: usize, x: f64, weights: &mut [f64], mut dweights: Option<&mut [f64]>) {
    debug_assert_eq!(weights.len(), n);
    let nf = n as f64;
    let y = x.rem_euclid(1.0);
    let s = (nf * PI * y).sin();
    let c = (nf * PI * y).cos();
    for j in 0..n {
        let t = y - node(n, j);
        let sp = (PI * t).sin();
        let (k, dk) = if sp.abs() < NEAR_NODE {
            kernel_by_sum(n, t)
        } else {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let cp = (PI * t).cos();
            let cot = cp / sp;
            let k = sign * s * cot / nf;
            let dk = PI * sign * c * cot - PI * sign * s / (nf * sp * sp);
            (k, dk)
        };
        weights[j] = k;
        if let Some(dw) = dweights.as_deref_mut() {
            dw[j] = dk;
        }
    }
}

/// Row vector `w` with `p(x) = w · samples` for any grid function of size `n`.
pub fn interpolation_row(n: usize, x: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    kernel_row(n, x, &mut w, None);
    w
}

/// Rows for `p(x)` and `p'(x)`.
pub fn interpolation_rows_with_derivative(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    kernel_row(n, x, &mut w, Some(&mut dw));
    (w, dw)
}

/// `cot(π m / n)` for m = 1..n-1 (index 0 unused).
fn cot_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n];
    for (m, v) in t.iter_mut().enumerate().skip(1) {
        let a = PI * m as f64 / n as f64;
        *v = a.cos() / a.sin();
    }
    t
}

/// A periodic function on ℝ/ℤ represented by its values at `x_j = j/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_resolution(samples.len())?;
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_resolution(n)?;
        Ok(Self {
            samples: (0..n).map(|j| f(node(n, j))).collect(),
        })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_fn(n, |_| c)
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn nodes(&self) -> Vec<f64> {
        nodes(self.resolution())
    }

    /// Value of the trigonometric interpolant at `x` (any real, read mod 1).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.resolution();
        let y = x.rem_euclid(1.0);
        // exact reproduction at nodes
        let pos = y * n as f64;
        let j = pos.round();
        if (pos - j).abs() < 1e-14 {
            return self.samples[(j as usize) % n];
        }
        // offset by one sample so constants are reproduced exactly
        let f0 = self.samples[0];
        let w = interpolation_row(n, y);
        f0 + w
            .iter()
            .zip(&self.samples)
            .map(|(w, f)| w * (f - f0))
            .sum::<f64>()
    }

    /// Exact derivative of the interpolant at `x`.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        let (_, dw) = interpolation_rows_with_derivative(self.resolution(), x);
        dot(&dw, &self.samples)
    }

    /// Spectral derivative at the nodes. Exact for trigonometric
    /// polynomials of degree < N/2.
    pub fn differentiate(&self) -> GridFunction {
        let n = self.resolution();
        let cot = cot_table(n);
        let f = &self.samples;
        let samples = (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (j, fj) in f.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let m = (i + n - j) % n;
                    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                    acc += sign * cot[m] * fj;
                }
                PI * acc
            })
            .collect();
        GridFunction { samples }
    }

    /// Mean-zero primitive of `f - mean(f)`. The Nyquist mode is dropped
    /// since its derivative vanishes at every node.
    pub fn antiderivative(&self) -> GridFunction {
        let n = self.resolution();
        let half = n / 2;
        let nf = n as f64;
        // real DFT coefficients for k = 1..half-1
        let mut a = vec![0.0; half];
        let mut b = vec![0.0; half];
        for k in 1..half {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, fj) in self.samples.iter().enumerate() {
                let arg = 2.0 * PI * (k * j % n) as f64 / nf;
                re += fj * arg.cos();
                im += fj * arg.sin();
            }
            a[k] = 2.0 * re / nf;
            b[k] = 2.0 * im / nf;
        }
        let samples = (0..n)
            .map(|j| {
                let mut acc = 0.0;
                for k in 1..half {
                    let arg = 2.0 * PI * (k * j % n) as f64 / nf;
                    let w = 2.0 * PI * k as f64;
                    acc += a[k] * arg.sin() / w - b[k] * arg.cos() / w;
                }
                acc
            })
            .collect();
        GridFunction { samples }
    }

    /// `f ∘ g` sampled at the nodes, with `g` read mod 1.
    pub fn compose(&self, g: &GridFunction) -> GridFunction {
        GridFunction {
            samples: g.samples.iter().map(|&y| self.eval(y)).collect(),
        }
    }

    /// Resample the interpolant on an `m`-point grid.
    pub fn resample(&self, m: usize) -> Result<GridFunction> {
        GridFunction::from_fn(m, |x| self.eval(x))
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.samples)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.resolution() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction> {
        crate::error::check_dim(self.resolution(), other.resolution())?;
        Ok(GridFunction {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

/// A linear functional on grid functions, `<l, φ> = Σ_j w_j φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    weights: Vec<f64>,
}

impl DualFunctional {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_resolution(weights.len())?;
        Ok(Self { weights })
    }

    /// Trapezoidal (equivalently spectral) quadrature for Lebesgue measure.
    pub fn lebesgue(n: usize) -> Result<Self> {
        check_resolution(n)?;
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn resolution(&self) -> usize {
        self.weights.len()
    }

    pub fn pair(&self, phi: &GridFunction) -> f64 {
        self.pair_samples(phi.samples())
    }

    pub fn pair_samples(&self, samples: &[f64]) -> f64 {
        dot(&self.weights, samples)
    }

    pub fn scaled(&self, c: f64) -> DualFunctional {
        DualFunctional {
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin2pi(x: f64) -> f64 {
        (2.0 * PI * x).sin()
    }

    #[test]
    fn rejects_bad_resolutions() {
        assert!(GridFunction::new(vec![0.0; 6]).is_err());
        assert!(GridFunction::new(vec![0.0; 9]).is_err());
        assert!(GridFunction::new(vec![0.0; 8]).is_ok());
    }

    #[test]
    fn eval_reproduces_nodes_and_is_periodic() {
        let f = GridFunction::from_fn(16, |x| (x * 7.3).sin() + x * x).unwrap();
        for (j, &v) in f.samples().iter().enumerate() {
            assert_eq!(f.eval(node(16, j)), v);
        }
        for &x in &[0.013, 0.37, 0.81] {
            assert!((f.eval(x) - f.eval(x + 1.0)).abs() < 1e-13);
            assert!((f.eval(x) - f.eval(x - 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn eval_is_exact_on_low_degree_trig_polynomials() {
        let p = |x: f64| {
            0.3 + (2.0 * PI * x).cos() - 0.5 * (6.0 * PI * x).sin() + 0.2 * (14.0 * PI * x).cos()
        };
        let f = GridFunction::from_fn(16, p).unwrap();
        for i in 0..50 {
            let x = i as f64 * 0.0193;
            assert!((f.eval(x) - p(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_sum_matches_closed_form_away_from_nodes() {
        for &t in &[0.011, 0.2, 0.43] {
            let (k, dk) = kernel_by_sum(32, t);
            let s = (32.0 * PI * t).sin();
            let c = (32.0 * PI * t).cos();
            let cot = (PI * t).cos() / (PI * t).sin();
            assert!((k - s * cot / 32.0).abs() < 1e-13);
            let dk2 = PI * c * cot - PI * s / (32.0 * (PI * t).sin().powi(2));
            assert!((dk - dk2).abs() < 1e-11);
        }
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let f = GridFunction::constant(32, 1.0).unwrap();
        assert!(f.differentiate().sup_norm() < 1e-12);
    }

    #[test]
    fn derivative_of_sine() {
        let f = GridFunction::from_fn(32, sin2pi).unwrap();
        let df = f.differentiate();
        for (j, v) in df.samples().iter().enumerate() {
            let x = node(32, j);
            assert!((v - 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_converges_under_refinement() {
        let f = |x: f64| sin2pi(x).exp();
        let d64 = GridFunction::from_fn(64, f).unwrap().differentiate();
        let d128 = GridFunction::from_fn(128, f).unwrap().differentiate();
        for j in 0..64 {
            assert!((d64.samples()[j] - d128.samples()[2 * j]).abs() < 1e-8);
        }
    }

    #[test]
    fn eval_derivative_matches_spectral_derivative_at_nodes() {
        let f = GridFunction::from_fn(32, |x| (sin2pi(x) * 0.7).exp()).unwrap();
        let df = f.differentiate();
        for j in 0..32 {
            assert!((f.eval_derivative(node(32, j)) - df.samples()[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn compose_shift_and_constant() {
        let n = 32;
        let c = GridFunction::constant(n, 2.5).unwrap();
        let g = GridFunction::from_fn(n, |x| 0.3 * sin2pi(x) + x).unwrap();
        assert!(c
            .compose(&g)
            .samples()
            .iter()
            .all(|v| (v - 2.5).abs() < 1e-13));

        let f = GridFunction::from_fn(n, sin2pi).unwrap();
        let shift = GridFunction::from_fn(n, |x| (x + 0.25).rem_euclid(1.0)).unwrap();
        let h = f.compose(&shift);
        for (j, v) in h.samples().iter().enumerate() {
            assert!((v - (2.0 * PI * node(n, j)).cos()).abs() < 1e-10);
        }

        let id = GridFunction::from_fn(n, |x| x).unwrap();
        assert_eq!(f.compose(&id), f);
    }

    #[test]
    fn antiderivative_inverts_differentiation_on_mean_zero_polys() {
        let f = GridFunction::from_fn(32, |x| (2.0 * PI * x).cos() - 0.4 * (10.0 * PI * x).sin())
            .unwrap();
        let g = f.antiderivative().differentiate();
        for (a, b) in g.samples().iter().zip(f.samples()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn lebesgue_functional() {
        let l = DualFunctional::lebesgue(16).unwrap();
        let one = GridFunction::constant(16, 1.0).unwrap();
        assert!((l.pair(&one) - 1.0).abs() < 1e-15);
        let s = GridFunction::from_fn(16, sin2pi).unwrap();
        assert!(l.pair(&s).abs() < 1e-15);
    }

    #[test]
    fn circle_distance_wraps() {
        assert!((circle_distance(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((circle_distance(0.2, 0.7) - 0.5).abs() < 1e-15);
        assert_eq!(circle_distance(0.25, 1.25), 0.0);
    }
}
