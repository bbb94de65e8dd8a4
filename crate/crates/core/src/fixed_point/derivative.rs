use nalgebra::{DMatrix, DVector};

use super::map::{euclidean_norm, GradedMap};
use crate::error::{check_dim, Error, Result};
use crate::OperatorMatrix;

/// Below this smallest singular value `Id − Q` is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;
/// Neumann summation is used as a cross-check when `‖Q‖₂` is below this.
pub const NEUMANN_NORM_LIMIT: f64 = 0.9;
pub const NEUMANN_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolution {
    pub z: Vec<f64>,
    pub min_singular_value: f64,
    /// Estimate of `‖Q‖₂` from power iteration on `QᵀQ`.
    pub q_norm_estimate: f64,
    /// Relative difference between the direct solve and the Neumann sum,
    /// when the Neumann series was evaluated.
    pub neumann_relative_gap: Option<f64>,
}

/// Power-iteration estimate of the spectral norm.
pub fn spectral_norm_estimate(q: &OperatorMatrix) -> f64 {
    let n = q.ncols();
    if n == 0 {
        return 0.0;
    }
    // deterministic, generic start vector
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.37 * ((i as f64) * 0.731).sin());
    v /= v.norm();
    let mut sigma = 0.0;
    for _ in 0..100 {
        let w = q.tr_mul(&(q * &v));
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = nw.sqrt();
        v = w / nw;
        if (next - sigma).abs() <= 1e-12 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// Solve `(Id − Q) z = b` by a dense LU factorization after checking that the
/// smallest singular value of `Id − Q` exceeds [`SINGULAR_THRESHOLD`].
pub fn solve_resolvent(q: &OperatorMatrix, b: &[f64]) -> Result<ResolventSolution> {
    let n = q.nrows();
    if q.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.ncols(),
        });
    }
    check_dim(n, b.len())?;
    let a = DMatrix::identity(n, n) - q;
    let min_singular_value = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |m, &s| m.min(s));
    if !(min_singular_value > SINGULAR_THRESHOLD) {
        return Err(Error::SingularSystem { min_singular_value });
    }
    let rhs = DVector::from_column_slice(b);
    let z = a
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { min_singular_value })?;

    let q_norm_estimate = spectral_norm_estimate(q);
    let neumann_relative_gap = (q_norm_estimate < NEUMANN_NORM_LIMIT).then(|| {
        let sum = neumann_sum(q, &rhs, NEUMANN_TERMS);
        let scale = z.norm().max(f64::MIN_POSITIVE);
        (sum - &z).norm() / scale
    });
    Ok(ResolventSolution {
        z: z.as_slice().to_vec(),
        min_singular_value,
        q_norm_estimate,
        neumann_relative_gap,
    })
}

/// `Σ_{n < terms} Qⁿ b`.
pub fn neumann_sum(q: &OperatorMatrix, b: &DVector<f64>, terms: usize) -> DVector<f64> {
    let mut term = b.clone();
    let mut sum = b.clone();
    for _ in 1..terms {
        term = q * term;
        sum += &term;
    }
    sum
}

/// `D_uφ(u₀)·h = (Id − Q₀)⁻¹ P₀ h`.
pub fn implicit_derivative(
    p0: &OperatorMatrix,
    q0: &OperatorMatrix,
    h: &[f64],
) -> Result<Vec<f64>> {
    implicit_derivative_report(p0, q0, h).map(|s| s.z)
}

pub fn implicit_derivative_report(
    p0: &OperatorMatrix,
    q0: &OperatorMatrix,
    h: &[f64],
) -> Result<ResolventSolution> {
    check_dim(p0.ncols(), h.len())?;
    check_dim(q0.nrows(), p0.nrows())?;
    let ph = p0 * DVector::from_column_slice(h);
    solve_resolvent(q0, ph.as_slice())
}

/// Second derivative `D²_uφ(u₀)[h1, h2]` of the fixed point of a 2-graded
/// family:
///
/// ```text
/// φ_i = (Id − Q)⁻¹ P h_i
/// R⁽²⁾ = Q⁽²'⁰⁾[h1,h2] + Q⁽¹'¹⁾[h1,φ2] + Q⁽¹'¹⁾[h2,φ1] + Q⁽⁰'²⁾[φ1,φ2]
/// D²φ[h1,h2] = (Id − Q)⁻¹ R⁽²⁾
/// ```
///
/// `phi0` must be the fixed point at `u0`.
pub fn second_derivative_graded<F: GradedMap + ?Sized>(
    map: &F,
    u0: &[f64],
    phi0: &[f64],
    h1: &[f64],
    h2: &[f64],
) -> Result<Vec<f64>> {
    check_dim(map.param_dim(), h1.len())?;
    check_dim(map.param_dim(), h2.len())?;
    if euclidean_norm(h1) == 0.0 || euclidean_norm(h2) == 0.0 {
        return Ok(vec![0.0; map.state_dim()]);
    }
    let p = map.p_operator(u0, phi0)?;
    let q = map.q_operator(u0, phi0)?;
    let phi1 = implicit_derivative(&p, &q, h1)?;
    let phi2 = implicit_derivative(&p, &q, h2)?;
    let mut r = map.q20(u0, phi0, h1, h2)?;
    let terms = [
        map.q11(u0, phi0, h1, &phi2)?,
        map.q11(u0, phi0, h2, &phi1)?,
        map.q02(u0, phi0, &phi1, &phi2)?,
    ];
    for t in &terms {
        check_dim(r.len(), t.len())?;
        for (a, b) in r.iter_mut().zip(t) {
            *a += b;
        }
    }
    Ok(solve_resolvent(&q, &r)?.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_point::map::{ClosureMap, ParametrizedMap};

    #[test]
    fn zero_q_gives_p_h() {
        let p = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, -1.0, 3.0, 0.5]);
        let q = DMatrix::zeros(3, 3);
        let z = implicit_derivative(&p, &q, &[1.0, -2.0]).unwrap();
        assert_eq!(z, vec![-3.0, 2.0, 2.0]);
    }

    #[test]
    fn half_identity_doubles() {
        let p = DMatrix::identity(4, 4);
        let q = DMatrix::identity(4, 4) * 0.5;
        let h = [1.0, -0.5, 0.25, 2.0];
        let r = implicit_derivative_report(&p, &q, &h).unwrap();
        for (z, hh) in r.z.iter().zip(&h) {
            assert!((z - 2.0 * hh).abs() < 1e-14);
        }
        assert!(r.neumann_relative_gap.unwrap() < 1e-12);
        assert!((r.q_norm_estimate - 0.5).abs() < 1e-10);
    }

    #[test]
    fn singular_resolvent_is_detected() {
        let p = DMatrix::identity(2, 2);
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.3]);
        let err = implicit_derivative(&p, &q, &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }

    #[test]
    fn neumann_agrees_with_direct_solve() {
        let n = 12;
        let q = DMatrix::from_fn(n, n, |i, j| {
            0.6 / n as f64 * (((i * 7 + j * 3) % 5) as f64 - 2.0)
        });
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let r = solve_resolvent(&q, &b).unwrap();
        if r.q_norm_estimate < NEUMANN_NORM_LIMIT {
            assert!(r.neumann_relative_gap.unwrap() < 1e-8);
        }
    }

    struct Quadratic;

    impl ParametrizedMap for Quadratic {
        fn state_dim(&self) -> usize {
            1
        }
        fn param_dim(&self) -> usize {
            1
        }
        fn apply(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![phi[0] / 2.0 + u[0] * u[0] / 2.0])
        }
        fn p_operator(&self, u: &[f64], _phi: &[f64]) -> Result<OperatorMatrix> {
            Ok(DMatrix::from_element(1, 1, u[0]))
        }
        fn q_operator(&self, _u: &[f64], _phi: &[f64]) -> Result<OperatorMatrix> {
            Ok(DMatrix::from_element(1, 1, 0.5))
        }
    }

    impl GradedMap for Quadratic {
        fn q20(&self, _u: &[f64], _phi: &[f64], h1: &[f64], h2: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![h1[0] * h2[0]])
        }
        fn q11(&self, _u: &[f64], _phi: &[f64], _h: &[f64], _z: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![0.0])
        }
        fn q02(&self, _u: &[f64], _phi: &[f64], _z: &[f64], _w: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![0.0])
        }
    }

    #[test]
    fn second_derivative_of_u_squared() {
        // φ*(u) = u²
        let d2 = second_derivative_graded(&Quadratic, &[0.0], &[0.0], &[1.0], &[1.0]).unwrap();
        assert!((d2[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn missing_coefficient_is_reported() {
        let map = ClosureMap::new(1, 1, |u, phi| Ok(vec![phi[0] / 2.0 + u[0]]))
            .with_p(|_, _| DMatrix::from_element(1, 1, 1.0))
            .with_q(|_, _| DMatrix::from_element(1, 1, 0.5));
        let err = second_derivative_graded(&map, &[0.0], &[0.0], &[1.0], &[1.0]).unwrap_err();
        assert_eq!(err, Error::MissingCoefficient("Q(2,0)"));
    }
}
