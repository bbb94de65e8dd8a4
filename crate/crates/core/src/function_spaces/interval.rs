//! Functions on a compact interval `[a, b]`.
//!
//! Two linear reconstructions are available. [`IntervalBasis::CubicSpline`]
//! uses equispaced samples and a not-a-knot cubic spline, which is robust for
//! data of low smoothness. [`IntervalBasis::Chebyshev`] uses Chebyshev–Lobatto
//! nodes and barycentric polynomial interpolation, which is exact to rounding
//! for analytic data once the resolution resolves it.
//!
//! Both reconstructions are linear in the samples, so every pointwise value
//! or derivative is available as a dense row vector. Operator matrices built
//! from these rows agree exactly with pointwise evaluation.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::grid::{dot, sup_norm};
use crate::error::{Error, Result};

/// Slack allowed when deciding whether a point lies in `[a, b]`.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalBasis {
    CubicSpline,
    Chebyshev,
}

#[derive(Debug)]
enum BasisData {
    /// `moments = S · samples` gives the spline second derivatives at nodes.
    Spline {
        h: f64,
        s: DMatrix<f64>,
    },
    Chebyshev {
        bary: Vec<f64>,
        diff: DMatrix<f64>,
    },
}

/// Nodes and precomputed reconstruction data, shared between all functions
/// living on the same grid.
#[derive(Debug)]
pub struct IntervalGrid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    data: BasisData,
}

impl IntervalGrid {
    pub fn new(basis: IntervalBasis, a: f64, b: f64, m: usize) -> Result<Arc<Self>> {
        if m < 8 {
            return Err(Error::InvalidArgument(format!(
                "interval functions need at least 8 samples, got {m}"
            )));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "invalid interval [{a}, {b}]"
            )));
        }
        let grid = match basis {
            IntervalBasis::CubicSpline => {
                let h = (b - a) / (m - 1) as f64;
                let nodes: Vec<f64> = (0..m)
                    .map(|j| if j == m - 1 { b } else { a + j as f64 * h })
                    .collect();
                let s = spline_moment_operator(m, h)?;
                IntervalGrid {
                    a,
                    b,
                    nodes,
                    data: BasisData::Spline { h, s },
                }
            }
            IntervalBasis::Chebyshev => {
                let mid = 0.5 * (a + b);
                let rad = 0.5 * (b - a);
                let nodes: Vec<f64> = (0..m)
                    .map(|j| {
                        if j == 0 {
                            a
                        } else if j == m - 1 {
                            b
                        } else {
                            mid - rad * (PI * j as f64 / (m - 1) as f64).cos()
                        }
                    })
                    .collect();
                let bary: Vec<f64> = (0..m)
                    .map(|j| {
                        let w = if j % 2 == 0 { 1.0 } else { -1.0 };
                        if j == 0 || j == m - 1 {
                            0.5 * w
                        } else {
                            w
                        }
                    })
                    .collect();
                let mut diff = DMatrix::zeros(m, m);
                for i in 0..m {
                    let mut row_sum = 0.0;
                    for j in 0..m {
                        if i != j {
                            let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                            diff[(i, j)] = v;
                            row_sum += v;
                        }
                    }
                    diff[(i, i)] = -row_sum;
                }
                IntervalGrid {
                    a,
                    b,
                    nodes,
                    data: BasisData::Chebyshev { bary, diff },
                }
            }
        };
        Ok(Arc::new(grid))
    }

    pub fn basis(&self) -> IntervalBasis {
        match self.data {
            BasisData::Spline { .. } => IntervalBasis::CubicSpline,
            BasisData::Chebyshev { .. } => IntervalBasis::Chebyshev,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn check_domain(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < self.a - DOMAIN_SLACK || x > self.b + DOMAIN_SLACK {
            return Err(Error::OutOfDomain {
                x,
                a: self.a,
                b: self.b,
            });
        }
        Ok(x.clamp(self.a, self.b))
    }

    /// Row `w` such that the `order`-th derivative of the reconstruction at
    /// `x` equals `w · samples`. Orders 0, 1 and 2 are supported.
    pub fn row(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        if order > 2 {
            return Err(Error::InvalidArgument(format!(
                "derivative order {order} is not supported"
            )));
        }
        let x = self.check_domain(x)?;
        let m = self.len();
        match &self.data {
            BasisData::Spline { h, s } => {
                let (k, t) = self.locate(x, *h);
                let (ca, cb, cm0, cm1) = spline_coefficients(t, *h, order);
                let mut row: Vec<f64> = (0..m)
                    .map(|j| cm0 * s[(k, j)] + cm1 * s[(k + 1, j)])
                    .collect();
                row[k] += ca;
                row[k + 1] += cb;
                Ok(row)
            }
            BasisData::Chebyshev { bary, diff } => {
                let l = barycentric_row(&self.nodes, bary, x);
                if order == 0 {
                    return Ok(l);
                }
                let mut row = l;
                for _ in 0..order {
                    row = (0..m)
                        .map(|j| (0..m).map(|i| row[i] * diff[(i, j)]).sum())
                        .collect();
                }
                Ok(row)
            }
        }
    }

    /// Interval index `k` with `x ∈ [x_k, x_{k+1}]` and the local coordinate.
    fn locate(&self, x: f64, h: f64) -> (usize, f64) {
        let m = self.len();
        let pos = (x - self.a) / h;
        let k = (pos.floor().max(0.0) as usize).min(m - 2);
        let t = ((x - self.nodes[k]) / h).clamp(0.0, 1.0);
        (k, t)
    }
}

/// Not-a-knot spline: solve `A m = B y` once, return `S = A⁻¹ B`.
fn spline_moment_operator(m: usize, h: f64) -> Result<DMatrix<f64>> {
    let mut a = DMatrix::zeros(m, m);
    let mut bmat = DMatrix::zeros(m, m);
    // third derivative continuous across x_1 and x_{m-2}
    a[(0, 0)] = 1.0;
    a[(0, 1)] = -2.0;
    a[(0, 2)] = 1.0;
    a[(m - 1, m - 3)] = 1.0;
    a[(m - 1, m - 2)] = -2.0;
    a[(m - 1, m - 1)] = 1.0;
    let c = 6.0 / (h * h);
    for k in 1..m - 1 {
        a[(k, k - 1)] = 1.0;
        a[(k, k)] = 4.0;
        a[(k, k + 1)] = 1.0;
        bmat[(k, k - 1)] = c;
        bmat[(k, k)] = -2.0 * c;
        bmat[(k, k + 1)] = c;
    }
    a.lu()
        .solve(&bmat)
        .ok_or_else(|| Error::InvalidArgument("spline moment system is singular".into()))
}

/// Coefficients of `(y_k, y_{k+1}, m_k, m_{k+1})` in the `order`-th
/// derivative of the spline piece at local coordinate `t`.
fn spline_coefficients(t: f64, h: f64, order: usize) -> (f64, f64, f64, f64) {
    let u = 1.0 - t;
    match order {
        0 => (
            u,
            t,
            h * h / 6.0 * (u * u * u - u),
            h * h / 6.0 * (t * t * t - t),
        ),
        1 => (
            -1.0 / h,
            1.0 / h,
            -h / 6.0 * (3.0 * u * u - 1.0),
            h / 6.0 * (3.0 * t * t - 1.0),
        ),
        _ => (0.0, 0.0, u, t),
    }
}

fn barycentric_row(nodes: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    let m = nodes.len();
    let mut row = vec![0.0; m];
    for j in 0..m {
        if x == nodes[j] {
            row[j] = 1.0;
            return row;
        }
    }
    let mut denom = 0.0;
    for j in 0..m {
        let v = bary[j] / (x - nodes[j]);
        row[j] = v;
        denom += v;
    }
    for v in &mut row {
        *v /= denom;
    }
    row
}

#[derive(Debug, Clone)]
enum Derived {
    /// Spline second derivatives at nodes.
    Moments(Vec<f64>),
    /// First and second derivative samples of the interpolating polynomial.
    Polynomial { d1: Vec<f64>, d2: Vec<f64> },
}

/// A function on `[a, b]` known through its samples on an [`IntervalGrid`].
#[derive(Debug, Clone)]
pub struct IntervalFunction {
    grid: Arc<IntervalGrid>,
    samples: Vec<f64>,
    derived: Derived,
}

impl PartialEq for IntervalFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) && self.samples == other.samples
    }
}

impl IntervalFunction {
    pub fn new(grid: Arc<IntervalGrid>, samples: Vec<f64>) -> Result<Self> {
        crate::error::check_dim(grid.len(), samples.len())?;
        let derived = match &grid.data {
            BasisData::Spline { s, .. } => Derived::Moments(matvec(s, &samples)),
            BasisData::Chebyshev { diff, .. } => {
                let d1 = matvec(diff, &samples);
                let d2 = matvec(diff, &d1);
                Derived::Polynomial { d1, d2 }
            }
        };
        Ok(Self {
            grid,
            samples,
            derived,
        })
    }

    pub fn from_fn(grid: &Arc<IntervalGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.nodes.iter().map(|&t| f(t)).collect();
        Self::new(Arc::clone(grid), samples)
    }

    pub fn grid(&self) -> &Arc<IntervalGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_d(x, 0)
    }

    /// `order`-th derivative (0, 1 or 2) of the reconstruction at `x`.
    pub fn eval_d(&self, x: f64, order: usize) -> Result<f64> {
        let x = self.grid.check_domain(x)?;
        match (&self.grid.data, &self.derived) {
            (BasisData::Spline { h, .. }, Derived::Moments(mom)) => {
                if order > 2 {
                    return Err(Error::InvalidArgument(format!(
                        "derivative order {order} is not supported"
                    )));
                }
                let (k, t) = self.grid.locate(x, *h);
                let (ca, cb, c0, c1) = spline_coefficients(t, *h, order);
                Ok(ca * self.samples[k] + cb * self.samples[k + 1] + c0 * mom[k] + c1 * mom[k + 1])
            }
            (BasisData::Chebyshev { bary, .. }, Derived::Polynomial { d1, d2 }) => {
                let values = match order {
                    0 => &self.samples,
                    1 => d1,
                    2 => d2,
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "derivative order {order} is not supported"
                        )))
                    }
                };
                Ok(dot(&barycentric_row(&self.grid.nodes, bary, x), values))
            }
            _ => unreachable!("derived data always matches the grid basis"),
        }
    }

    /// Derivative of the reconstruction, sampled at the nodes.
    pub fn differentiate(&self) -> IntervalFunction {
        let samples = match (&self.grid.data, &self.derived) {
            (BasisData::Chebyshev { .. }, Derived::Polynomial { d1, .. }) => d1.clone(),
            _ => self
                .grid
                .nodes
                .iter()
                .map(|&t| self.eval_d(t, 1).expect("nodes lie in the domain"))
                .collect(),
        };
        IntervalFunction::new(Arc::clone(&self.grid), samples).expect("same grid")
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.samples)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> IntervalFunction {
        let samples = self.samples.iter().map(|&v| f(v)).collect();
        IntervalFunction::new(Arc::clone(&self.grid), samples).expect("same grid")
    }
}

fn matvec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(v)).as_slice().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubics_exactly() {
        let grid = IntervalGrid::new(IntervalBasis::CubicSpline, -1.0, 1.0, 17).unwrap();
        let p = |t: f64| 0.5 - t + 0.25 * t * t - 0.75 * t * t * t;
        let dp = |t: f64| -1.0 + 0.5 * t - 2.25 * t * t;
        let ddp = |t: f64| 0.5 - 4.5 * t;
        let f = IntervalFunction::from_fn(&grid, p).unwrap();
        for i in 0..40 {
            let x = -1.0 + 2.0 * i as f64 / 39.0;
            assert!((f.eval(x).unwrap() - p(x)).abs() < 1e-12);
            assert!((f.eval_d(x, 1).unwrap() - dp(x)).abs() < 1e-11);
            assert!((f.eval_d(x, 2).unwrap() - ddp(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn chebyshev_is_accurate_for_analytic_data() {
        let grid = IntervalGrid::new(IntervalBasis::Chebyshev, -1.0, 1.0, 33).unwrap();
        let f = IntervalFunction::from_fn(&grid, f64::cos).unwrap();
        for i in 0..25 {
            let x = -0.97 + 0.08 * i as f64;
            assert!((f.eval(x).unwrap() - x.cos()).abs() < 1e-14);
            assert!((f.eval_d(x, 1).unwrap() + x.sin()).abs() < 1e-12);
            assert!((f.eval_d(x, 2).unwrap() + x.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn rows_agree_with_pointwise_evaluation() {
        for basis in [IntervalBasis::CubicSpline, IntervalBasis::Chebyshev] {
            let grid = IntervalGrid::new(basis, 0.0, 2.0, 21).unwrap();
            let f = IntervalFunction::from_fn(&grid, |t| (3.0 * t).sin() + t).unwrap();
            for &x in &[0.0, 0.33, 1.0, 1.77, 2.0] {
                for order in 0..3 {
                    let row = grid.row(x, order).unwrap();
                    let v = dot(&row, f.samples());
                    assert!(
                        (v - f.eval_d(x, order).unwrap()).abs() < 1e-9,
                        "{basis:?} {x} {order}"
                    );
                }
            }
        }
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let grid = IntervalGrid::new(IntervalBasis::CubicSpline, -1.0, 1.0, 9).unwrap();
        let f = IntervalFunction::from_fn(&grid, |t| t).unwrap();
        assert!(matches!(f.eval(1.5), Err(Error::OutOfDomain { .. })));
        assert!(f.eval(1.0 + 1e-14).is_ok());
    }

    #[test]
    fn nodes_are_interpolated() {
        for basis in [IntervalBasis::CubicSpline, IntervalBasis::Chebyshev] {
            let grid = IntervalGrid::new(basis, -1.0, 1.0, 12).unwrap();
            let f = IntervalFunction::from_fn(&grid, |t| t.abs().sqrt()).unwrap();
            for (t, v) in grid.nodes().iter().zip(f.samples()) {
                assert!((f.eval(*t).unwrap() - v).abs() < 1e-13);
            }
        }
    }
}
