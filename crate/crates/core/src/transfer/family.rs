use std::f64::consts::PI;

use crate::error::{check_dim, Error, Result};

/// `a0 + Σ_k (cos[k−1]·cos(2πkx) + sin[k−1]·sin(2πkx))`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigSeries {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self { a0, cos, sin }
    }

    pub fn constant(a0: f64) -> Self {
        Self::new(a0, Vec::new(), Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0.0 && self.cos.iter().chain(&self.sin).all(|c| *c == 0.0)
    }

    /// Value and first two derivatives at `x`.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let (mut v, mut d1, mut d2) = (self.a0, 0.0, 0.0);
        let len = self.cos.len().max(self.sin.len());
        for k in 1..=len {
            let w = 2.0 * PI * k as f64;
            let (s, c) = (w * x).sin_cos();
            let a = self.cos.get(k - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            v += a * c + b * s;
            d1 += w * (b * c - a * s);
            d2 -= w * w * (a * c + b * s);
        }
        (v, d1, d2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval3(x).0
    }
}

/// How a parameter component enters a map perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `u`
    Linear,
    /// `|u|^p`, Hölder of exponent `p` at `u = 0`.
    Power(f64),
}

impl Profile {
    fn value(self, u: f64) -> f64 {
        match self {
            Profile::Linear => u,
            Profile::Power(p) => u.abs().powf(p),
        }
    }

    fn derivative(self, u: f64) -> f64 {
        match self {
            Profile::Linear => 1.0,
            Profile::Power(p) => {
                if u == 0.0 {
                    if p > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p * u.abs().powf(p - 1.0) * u.signum()
                }
            }
        }
    }
}

/// A parametrized lift `T(u, ·): ℝ → ℝ` of a degree-`d` circle map, with
/// `T(u, x+1) = T(u, x) + d`.
pub trait MapFamily: Send + Sync {
    fn degree(&self) -> usize;
    fn param_dim(&self) -> usize;
    fn t(&self, u: &[f64], x: f64) -> f64;
    fn dtdx(&self, u: &[f64], x: f64) -> f64;
    fn d2tdx2(&self, u: &[f64], x: f64) -> f64;
    /// `∂_u T(u, x)`, one entry per parameter component.
    fn dtdu(&self, u: &[f64], x: f64) -> Vec<f64>;
    /// `∂_u ∂_x T(u, x)`.
    fn d2tdudx(&self, u: &[f64], x: f64) -> Vec<f64>;
}

/// `T(u, x) = d·x + s₀(x) + Σ_i profile_i(u_i)·s_i(x)` with trigonometric
/// series `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMapFamily {
    degree: usize,
    base: TrigSeries,
    terms: Vec<(Profile, TrigSeries)>,
}

impl TrigMapFamily {
    pub fn new(degree: usize, base: TrigSeries, terms: Vec<(Profile, TrigSeries)>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidArgument(format!(
                "degree must be >= 2, got {degree}"
            )));
        }
        Ok(Self {
            degree,
            base,
            terms,
        })
    }

    /// `x ↦ d·x`, with a zero-parameter family.
    pub fn linear(degree: usize) -> Result<Self> {
        Self::new(degree, TrigSeries::default(), Vec::new())
    }

    /// `T(u, x) = 2x + u·sin(2πx)/(2π)`.
    pub fn perturbed_doubling() -> Self {
        let s = TrigSeries::new(0.0, Vec::new(), vec![1.0 / (2.0 * PI)]);
        Self::new(2, TrigSeries::default(), vec![(Profile::Linear, s)]).expect("valid family")
    }

    /// Doubling map with a u-independent parameter slot, for families that
    /// carry all parameter dependence in the weight.
    pub fn doubling_with_params(param_dim: usize) -> Self {
        let terms = (0..param_dim)
            .map(|_| (Profile::Linear, TrigSeries::default()))
            .collect();
        Self::new(2, TrigSeries::default(), terms).expect("valid family")
    }

    fn check(&self, u: &[f64]) {
        debug_assert_eq!(u.len(), self.terms.len());
    }
}

impl MapFamily for TrigMapFamily {
    fn degree(&self) -> usize {
        self.degree
    }

    fn param_dim(&self) -> usize {
        self.terms.len()
    }

    fn t(&self, u: &[f64], x: f64) -> f64 {
        self.check(u);
        let mut v = self.degree as f64 * x + self.base.eval(x);
        for (ui, (p, s)) in u.iter().zip(&self.terms) {
            if !s.is_zero() {
                v += p.value(*ui) * s.eval(x);
            }
        }
        v
    }

    fn dtdx(&self, u: &[f64], x: f64) -> f64 {
        self.check(u);
        let mut v = self.degree as f64 + self.base.eval3(x).1;
        for (ui, (p, s)) in u.iter().zip(&self.terms) {
            if !s.is_zero() {
                v += p.value(*ui) * s.eval3(x).1;
            }
        }
        v
    }

    fn d2tdx2(&self, u: &[f64], x: f64) -> f64 {
        self.check(u);
        let mut v = self.base.eval3(x).2;
        for (ui, (p, s)) in u.iter().zip(&self.terms) {
            if !s.is_zero() {
                v += p.value(*ui) * s.eval3(x).2;
            }
        }
        v
    }

    fn dtdu(&self, u: &[f64], x: f64) -> Vec<f64> {
        self.check(u);
        u.iter()
            .zip(&self.terms)
            .map(|(ui, (p, s))| {
                if s.is_zero() {
                    0.0
                } else {
                    p.derivative(*ui) * s.eval(x)
                }
            })
            .collect()
    }

    fn d2tdudx(&self, u: &[f64], x: f64) -> Vec<f64> {
        self.check(u);
        u.iter()
            .zip(&self.terms)
            .map(|(ui, (p, s))| {
                if s.is_zero() {
                    0.0
                } else {
                    p.derivative(*ui) * s.eval3(x).1
                }
            })
            .collect()
    }
}

/// u-independent part of a weight.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightBase {
    /// `1/|∂_x T(u, x)|`.
    Geometric,
    Constant(f64),
    Trig(TrigSeries),
}

/// `g(u, x) = (base(u, x) + Σ_i u_i·c_i(x))·exp(Σ_i κ_i u_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub base: WeightBase,
    /// Additive parameter terms `c_i`, empty or one per parameter component.
    pub additive: Vec<TrigSeries>,
    /// Log-scale coefficients `κ_i`, empty or one per parameter component.
    pub log_scale: Vec<f64>,
}

/// Value and derivatives of a weight at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightJet {
    pub g: f64,
    pub dx: f64,
    pub du: Vec<f64>,
}

impl Weight {
    pub fn geometric() -> Self {
        Self::from_base(WeightBase::Geometric)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_base(WeightBase::Constant(c))
    }

    pub fn from_base(base: WeightBase) -> Self {
        Self {
            base,
            additive: Vec::new(),
            log_scale: Vec::new(),
        }
    }

    pub fn with_additive(mut self, additive: Vec<TrigSeries>) -> Self {
        self.additive = additive;
        self
    }

    pub fn with_log_scale(mut self, log_scale: Vec<f64>) -> Self {
        self.log_scale = log_scale;
        self
    }

    pub fn check_params(&self, param_dim: usize) -> Result<()> {
        if !self.additive.is_empty() {
            check_dim(param_dim, self.additive.len())?;
        }
        if !self.log_scale.is_empty() {
            check_dim(param_dim, self.log_scale.len())?;
        }
        Ok(())
    }

    pub fn value<T: MapFamily + ?Sized>(&self, map: &T, u: &[f64], x: f64) -> f64 {
        self.jet(map, u, x).g
    }

    pub fn jet<T: MapFamily + ?Sized>(&self, map: &T, u: &[f64], x: f64) -> WeightJet {
        let p = u.len();
        let (mut b, mut bx, mut bu) = match &self.base {
            WeightBase::Geometric => {
                let d = map.dtdx(u, x);
                let sg = d.signum();
                let inv = 1.0 / d.abs();
                let bx = -sg * map.d2tdx2(u, x) * inv * inv;
                let bu: Vec<f64> = map
                    .d2tdudx(u, x)
                    .iter()
                    .map(|v| -sg * v * inv * inv)
                    .collect();
                (inv, bx, bu)
            }
            WeightBase::Constant(c) => (*c, 0.0, vec![0.0; p]),
            WeightBase::Trig(s) => {
                let (v, d, _) = s.eval3(x);
                (v, d, vec![0.0; p])
            }
        };
        for (i, c) in self.additive.iter().enumerate() {
            let (v, d, _) = c.eval3(x);
            b += u[i] * v;
            bx += u[i] * d;
            bu[i] += v;
        }
        let kappa: f64 = self.log_scale.iter().zip(u).map(|(k, ui)| k * ui).sum();
        let scale = kappa.exp();
        let mut du: Vec<f64> = bu.iter().map(|v| v * scale).collect();
        for (i, k) in self.log_scale.iter().enumerate() {
            du[i] += k * b * scale;
        }
        WeightJet {
            g: b * scale,
            dx: bx * scale,
            du,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-5;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn trig_series_derivatives() {
        let s = TrigSeries::new(0.3, vec![0.2, -0.1], vec![0.05, 0.0, 0.4]);
        for &x in &[0.0, 0.17, 0.5, 0.91] {
            let (_, d1, d2) = s.eval3(x);
            assert!((d1 - fd(|y| s.eval(y), x)).abs() < 1e-6);
            assert!((d2 - fd(|y| s.eval3(y).1, x)).abs() < 1e-5);
        }
    }

    #[test]
    fn lift_condition() {
        let t = TrigMapFamily::perturbed_doubling();
        for &x in &[0.0, 0.3, 0.77] {
            assert!((t.t(&[0.2], x + 1.0) - t.t(&[0.2], x) - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn family_derivatives_match_fd() {
        let t = TrigMapFamily::new(
            3,
            TrigSeries::new(0.0, vec![0.01], vec![]),
            vec![
                (
                    Profile::Linear,
                    TrigSeries::new(0.0, vec![0.0, 0.02], vec![0.05]),
                ),
                (
                    Profile::Power(1.5),
                    TrigSeries::new(0.0, vec![0.03], vec![]),
                ),
            ],
        )
        .unwrap();
        let u = [0.1, 0.2];
        for &x in &[0.05, 0.4, 0.8] {
            assert!((t.dtdx(&u, x) - fd(|y| t.t(&u, y), x)).abs() < 1e-7);
            assert!((t.d2tdx2(&u, x) - fd(|y| t.dtdx(&u, y), x)).abs() < 1e-6);
            let du = t.dtdu(&u, x);
            let dux = t.d2tdudx(&u, x);
            for i in 0..2 {
                let shift = |s: f64| {
                    let mut v = u;
                    v[i] += s;
                    v
                };
                assert!((du[i] - fd(|s| t.t(&shift(s), x), 0.0)).abs() < 1e-7);
                assert!((dux[i] - fd(|s| t.dtdx(&shift(s), x), 0.0)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn weight_jets_match_fd() {
        let t = TrigMapFamily::perturbed_doubling();
        let weights = [
            Weight::geometric(),
            Weight::constant(0.5).with_log_scale(vec![1.0]),
            Weight::from_base(WeightBase::Trig(TrigSeries::new(0.5, vec![0.1], vec![])))
                .with_additive(vec![TrigSeries::new(0.0, vec![0.05], vec![0.02])]),
        ];
        for w in &weights {
            for &(u, x) in &[(0.0, 0.1), (0.3, 0.6)] {
                let j = w.jet(&t, &[u], x);
                assert!((j.dx - fd(|y| w.value(&t, &[u], y), x)).abs() < 1e-7);
                assert!((j.du[0] - fd(|s| w.value(&t, &[s], x), u)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rejects_degree_one() {
        assert!(TrigMapFamily::linear(1).is_err());
    }
}
