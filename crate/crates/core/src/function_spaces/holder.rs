//! Computable surrogates for Hölder seminorms and `C^r` norms.
//!
//! The seminorm `sup_{x≠y} |f(x) - f(y)| / d(x, y)^α` is estimated by a
//! maximum over a finite pair set: every node pair at a dyadic separation plus
//! `pair_budget` seeded pseudo-random pairs. The result is therefore a lower
//! bound of the true seminorm, and the same pair set is used for every
//! exponent so that comparisons between exponents are consistent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{circle_distance, sup_norm, GridFunction};
use super::interval::IntervalFunction;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Shortest separation drawn for random pairs on the circle.
const MIN_RANDOM_LOG2: f64 = -16.0;

/// A sampled function whose Hölder seminorms can be estimated.
pub trait HolderSampled: Sized {
    fn samples(&self) -> &[f64];

    /// Derivative sampled at the nodes.
    fn derivative(&self) -> Self;

    /// Node index pairs `(i, j)` with their distance.
    fn dyadic_pairs(&self) -> Vec<(usize, usize, f64)>;

    /// Draw a random pair, returning `(distance, |f(x) - f(y)|)`.
    fn random_pair(&self, rng: &mut ChaCha8Rng) -> (f64, f64);
}

impl HolderSampled for GridFunction {
    fn samples(&self) -> &[f64] {
        GridFunction::samples(self)
    }

    fn derivative(&self) -> Self {
        self.differentiate()
    }

    fn dyadic_pairs(&self) -> Vec<(usize, usize, f64)> {
        let n = self.resolution();
        let mut pairs = Vec::new();
        let mut denom = 2usize;
        while n.is_multiple_of(denom) {
            let step = n / denom;
            let dist = 1.0 / denom as f64;
            for i in 0..n {
                pairs.push((i, (i + step) % n, dist));
            }
            denom *= 2;
        }
        pairs
    }

    fn random_pair(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let x: f64 = rng.gen();
        let e: f64 = rng.gen_range(MIN_RANDOM_LOG2..-1.0);
        let y = x + e.exp2();
        (circle_distance(x, y), (self.eval(x) - self.eval(y)).abs())
    }
}

impl HolderSampled for IntervalFunction {
    fn samples(&self) -> &[f64] {
        IntervalFunction::samples(self)
    }

    fn derivative(&self) -> Self {
        self.differentiate()
    }

    fn dyadic_pairs(&self) -> Vec<(usize, usize, f64)> {
        let m = self.len();
        let nodes = self.grid().nodes();
        let mut pairs = Vec::new();
        let mut step = 1usize;
        while step < m {
            for i in 0..m - step {
                pairs.push((i, i + step, (nodes[i + step] - nodes[i]).abs()));
            }
            step *= 2;
        }
        pairs
    }

    // Random node pairs: the reconstruction between nodes is not trusted for
    // data of low regularity.
    fn random_pair(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let m = self.len();
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let nodes = self.grid().nodes();
        let s = self.samples();
        ((nodes[i] - nodes[j]).abs(), (s[i] - s[j]).abs())
    }
}

/// All sampled pairs `(distance, |difference|)` for one function.
fn pair_set<F: HolderSampled>(f: &F, pair_budget: usize, seed: u64) -> Vec<(f64, f64)> {
    let s = f.samples();
    let budget = pair_budget.max(s.len());
    let mut pairs: Vec<(f64, f64)> = f
        .dyadic_pairs()
        .into_iter()
        .map(|(i, j, d)| (d, (s[i] - s[j]).abs()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.extend((0..budget).map(|_| f.random_pair(&mut rng)));
    pairs
}

fn max_quotient(pairs: &[(f64, f64)], alpha: f64) -> f64 {
    pairs
        .iter()
        .filter(|(d, _)| *d > 0.0)
        .fold(0.0_f64, |m, (d, v)| m.max(v / d.powf(alpha)))
}

/// Lower estimate of the α-Hölder seminorm of `f`. For α = 1 the sup of
/// `|f'|` at the nodes is included as the zero-separation limit.
pub fn holder_seminorm<F: HolderSampled>(f: &F, alpha: f64, pair_budget: usize) -> Result<f64> {
    holder_seminorm_seeded(f, alpha, pair_budget, DEFAULT_SEED)
}

pub fn holder_seminorm_seeded<F: HolderSampled>(
    f: &F,
    alpha: f64,
    pair_budget: usize,
    seed: u64,
) -> Result<f64> {
    check_exponent(alpha)?;
    let pairs = pair_set(f, pair_budget, seed);
    let mut est = max_quotient(&pairs, alpha);
    if alpha == 1.0 {
        est = est.max(sup_norm(f.derivative().samples()));
    }
    Ok(est)
}

fn check_exponent(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Hölder exponent {alpha} not in (0, 1]"
        )))
    }
}

/// Summary of a `C^r` norm evaluation, `r = k + α` with `α ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderNormReport {
    pub sup_norm: f64,
    /// `max_{i ≤ k} sup |f^{(i)}|`.
    pub ck_norm: f64,
    /// Estimated α-seminorm of `f^{(k)}`.
    pub seminorm_estimate: f64,
    pub exponent: f64,
    pub order: usize,
    /// Set when `k ≥ N/4`, where repeated differentiation is unreliable.
    pub resolution_warning: bool,
}

impl HolderNormReport {
    pub fn value(&self) -> f64 {
        self.ck_norm.max(self.seminorm_estimate)
    }
}

/// Split `r > 0` as `k + α` with `α ∈ (0, 1]`; integer `r` gives α = 1.
pub fn split_regularity(r: f64) -> Result<(usize, f64)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "regularity {r} must be positive"
        )));
    }
    let k = r.ceil() as usize - 1;
    Ok((k, r - k as f64))
}

pub fn cr_norm<F: HolderSampled>(f: &F, r: f64, pair_budget: usize) -> Result<HolderNormReport> {
    cr_norm_seeded(f, r, pair_budget, DEFAULT_SEED)
}

pub fn cr_norm_seeded<F: HolderSampled>(
    f: &F,
    r: f64,
    pair_budget: usize,
    seed: u64,
) -> Result<HolderNormReport> {
    let (k, alpha) = split_regularity(r)?;
    let n = f.samples().len();
    let sup = sup_norm(f.samples());
    let mut ck = sup;
    let mut top = None;
    for _ in 0..k {
        let d = match top.as_ref() {
            None => f.derivative(),
            Some(prev) => HolderSampled::derivative(prev),
        };
        ck = ck.max(sup_norm(d.samples()));
        top = Some(d);
    }
    let seminorm_estimate = match top.as_ref() {
        None => holder_seminorm_seeded(f, alpha, pair_budget, seed)?,
        Some(d) => holder_seminorm_seeded(d, alpha, pair_budget, seed)?,
    };
    Ok(HolderNormReport {
        sup_norm: sup,
        ck_norm: ck,
        seminorm_estimate,
        exponent: alpha,
        order: k,
        resolution_warning: 4 * k >= n,
    })
}

/// `C^r` norm value for `r ≥ 0`, with `r = 0` meaning the sup norm.
pub fn cr_value<F: HolderSampled>(f: &F, r: f64, pair_budget: usize) -> Result<f64> {
    if r == 0.0 {
        Ok(sup_norm(f.samples()))
    } else {
        Ok(cr_norm(f, r, pair_budget)?.value())
    }
}

/// The two sides of `||f||_{k+β} ≤ M ||f||_{k+α}^μ ||f||_{k+γ}^{1-μ}` with
/// `μ = (γ-β)/(γ-α)`, returned as `(lhs, rhs / M)`.
pub fn interpolation_sides<F: HolderSampled>(
    f: &F,
    k: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    pair_budget: usize,
) -> Result<(f64, f64)> {
    if !(0.0 <= alpha && alpha < beta && beta < gamma && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= alpha < beta < gamma < 1, got ({alpha}, {beta}, {gamma})"
        )));
    }
    let mu = (gamma - beta) / (gamma - alpha);
    let k = k as f64;
    let lhs = cr_value(f, k + beta, pair_budget)?;
    let low = cr_value(f, k + alpha, pair_budget)?;
    let high = cr_value(f, k + gamma, pair_budget)?;
    Ok((lhs, low.powf(mu) * high.powf(1.0 - mu)))
}

pub fn check_interpolation_inequality<F: HolderSampled>(
    f: &F,
    k: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    constant: f64,
) -> Result<bool> {
    let budget = 4 * f.samples().len();
    let (lhs, rhs) = interpolation_sides(f, k, alpha, beta, gamma, budget)?;
    Ok(lhs <= constant * rhs)
}

/// Smallest constant for which the interpolation inequality holds on `f`.
pub fn interpolation_constant<F: HolderSampled>(
    f: &F,
    k: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<f64> {
    let budget = 4 * f.samples().len();
    let (lhs, rhs) = interpolation_sides(f, k, alpha, beta, gamma, budget)?;
    if rhs == 0.0 {
        return Ok(if lhs == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_spaces::interval::{IntervalBasis, IntervalGrid};
    use std::f64::consts::PI;

    #[test]
    fn constants_have_zero_seminorm() {
        let f = GridFunction::constant(32, 5.0).unwrap();
        assert_eq!(holder_seminorm(&f, 0.5, 64).unwrap(), 0.0);
        let r = cr_norm(&GridFunction::constant(32, 1.0).unwrap(), 1.5, 64).unwrap();
        assert_eq!(r.value(), 1.0);
    }

    #[test]
    fn identity_on_unit_interval_is_one_lipschitz() {
        let grid = IntervalGrid::new(IntervalBasis::CubicSpline, 0.0, 1.0, 65).unwrap();
        let f = IntervalFunction::from_fn(&grid, |t| t).unwrap();
        let s = holder_seminorm(&f, 1.0, 256).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn square_root_half_holder() {
        let grid = IntervalGrid::new(IntervalBasis::CubicSpline, 0.0, 1.0, 257).unwrap();
        let f = IntervalFunction::from_fn(&grid, f64::sqrt).unwrap();
        let s = holder_seminorm(&f, 0.5, 1024).unwrap();
        assert!((0.95..=1.0 + 1e-12).contains(&s), "{s}");
    }

    #[test]
    fn sine_c1_norm_is_two_pi() {
        let f = GridFunction::from_fn(64, |x| (2.0 * PI * x).sin()).unwrap();
        let r = cr_norm(&f, 1.0, 128).unwrap();
        assert_eq!(r.order, 0);
        assert!((r.value() - 2.0 * PI).abs() < 1e-6, "{}", r.value());
    }

    #[test]
    fn invalid_exponents_rejected() {
        let f = GridFunction::constant(16, 1.0).unwrap();
        assert!(holder_seminorm(&f, 0.0, 16).is_err());
        assert!(holder_seminorm(&f, 1.5, 16).is_err());
        assert!(cr_norm(&f, -1.0, 16).is_err());
    }

    #[test]
    fn split_regularity_cases() {
        assert_eq!(split_regularity(0.5).unwrap(), (0, 0.5));
        assert_eq!(split_regularity(1.0).unwrap(), (0, 1.0));
        assert_eq!(split_regularity(2.0).unwrap(), (1, 1.0));
        let (k, a) = split_regularity(1.3).unwrap();
        assert_eq!(k, 1);
        assert!((a - 0.3).abs() < 1e-15);
    }

    #[test]
    fn resolution_warning_for_high_order() {
        let f = GridFunction::from_fn(8, |x| (2.0 * PI * x).cos()).unwrap();
        assert!(cr_norm(&f, 2.5, 8).unwrap().resolution_warning);
        assert!(!cr_norm(&f, 1.5, 8).unwrap().resolution_warning);
    }

    #[test]
    fn interpolation_inequality_for_constants_and_sine() {
        let one = GridFunction::constant(32, 1.0).unwrap();
        assert!(check_interpolation_inequality(&one, 0, 0.1, 0.4, 0.7, 1.0).unwrap());
        let s = GridFunction::from_fn(64, |x| (2.0 * PI * x).sin()).unwrap();
        assert!(check_interpolation_inequality(&s, 0, 0.2, 0.5, 0.8, 2.0).unwrap());
        assert!(check_interpolation_inequality(&s, 0, 0.3, 0.2, 0.8, 2.0).is_err());
    }
}
