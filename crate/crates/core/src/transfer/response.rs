use std::sync::Arc;

use nalgebra::DVector;

use super::family::{MapFamily, Weight};
use super::normalized::{normalized_map, NormalizedMap};
use super::operator::{assemble_operator, d_u_operator, twisted_operator};
use super::spectral::{gibbs_measure, leading_eigenvalue, spectral_data, SpectralData, POWER_TOL};
use crate::error::{check_dim, Result};
use crate::fd::richardson_first_scalar;
use crate::fixed_point::{solve_resolvent, ResolventSolution};
use crate::function_spaces::{DualFunctional, GridFunction};
use crate::OperatorMatrix;

/// Twist step of the pressure difference quotient.
pub const PRESSURE_STEP: f64 = 1e-4;

/// A map family, a weight and a resolution.
#[derive(Clone)]
pub struct TransferProblem {
    pub map: Arc<dyn MapFamily>,
    pub weight: Weight,
    pub n: usize,
    /// Power-iteration tolerance.
    pub tol: f64,
}

impl TransferProblem {
    pub fn new(map: Arc<dyn MapFamily>, weight: Weight, n: usize) -> Result<Self> {
        crate::function_spaces::check_resolution(n)?;
        weight.check_params(map.param_dim())?;
        Ok(Self {
            map,
            weight,
            n,
            tol: POWER_TOL,
        })
    }

    pub fn param_dim(&self) -> usize {
        self.map.param_dim()
    }

    pub fn operator(&self, u: &[f64]) -> Result<OperatorMatrix> {
        assemble_operator(self.map.as_ref(), &self.weight, u, self.n)
    }

    pub fn d_operator(&self, u: &[f64], h: &[f64]) -> Result<OperatorMatrix> {
        d_u_operator(self.map.as_ref(), &self.weight, u, h, self.n)
    }

    /// Spectral data at `u`, normalized against Lebesgue measure.
    pub fn reference_data(&self, u: &[f64]) -> Result<SpectralData> {
        spectral_data(
            &self.operator(u)?,
            &DualFunctional::lebesgue(self.n)?,
            self.tol,
        )
    }

    /// Spectral data at `u` with `⟨ell_ref, φ_u⟩ = 1`.
    pub fn data(&self, u: &[f64], ell_ref: &DualFunctional) -> Result<SpectralData> {
        spectral_data(&self.operator(u)?, ell_ref, self.tol)
    }

    pub fn normalized_map(&self, ell_ref: DualFunctional) -> Result<NormalizedMap> {
        normalized_map(self.map.clone(), self.weight.clone(), self.n, ell_ref)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearResponse {
    /// `D_uφ(u₀)·h`.
    pub response: GridFunction,
    /// Spectral data at `u₀`; its `ell` is the reference functional.
    pub data: SpectralData,
    pub solve: ResolventSolution,
}

fn add_scaled(a: &mut DVector<f64>, b: &DVector<f64>, s: f64) {
    a.axpy(s, b, 1.0);
}

/// `D_uφ(u₀)·h`: solves `(Id − λ⁻¹R) w = λ⁻¹(Id − Π)(∂_uL·h)φ₀`.
pub fn linear_response(problem: &TransferProblem, u0: &[f64], h: &[f64]) -> Result<LinearResponse> {
    let data = problem.reference_data(u0)?;
    linear_response_with(problem, &data, u0, h)
}

/// As [`linear_response`] with precomputed spectral data at `u₀`.
pub fn linear_response_with(
    problem: &TransferProblem,
    data: &SpectralData,
    u0: &[f64],
    h: &[f64],
) -> Result<LinearResponse> {
    check_dim(problem.param_dim(), h.len())?;
    let phi0 = DVector::from_column_slice(data.phi.samples());
    let dl_phi = problem.d_operator(u0, h)? * &phi0;
    let ell = DVector::from_column_slice(data.ell.weights());
    // (Id − Π)v = v − ⟨ℓ,v⟩φ
    let mut rhs = dl_phi.clone();
    add_scaled(&mut rhs, &phi0, -ell.dot(&dl_phi));
    rhs /= data.lambda;
    let q = &data.r / data.lambda;
    let solve = solve_resolvent(&q, rhs.as_slice())?;
    Ok(LinearResponse {
        response: GridFunction::new(solve.z.clone())?,
        data: data.clone(),
        solve,
    })
}

/// `Dλ·h = ⟨ℓ₀, (∂_uL·h)φ₀⟩ + ⟨ℓ₀, L₀D_uφ·h⟩`.
pub fn lambda_derivative(problem: &TransferProblem, u0: &[f64], h: &[f64]) -> Result<f64> {
    let resp = linear_response(problem, u0, h)?;
    let data = &resp.data;
    let phi0 = DVector::from_column_slice(data.phi.samples());
    let ell = DVector::from_column_slice(data.ell.weights());
    let dl_phi = problem.d_operator(u0, h)? * &phi0;
    let l0 = problem.operator(u0)?;
    let l_dphi = l0 * DVector::from_column_slice(resp.response.samples());
    Ok(ell.dot(&dl_phi) + ell.dot(&l_dphi))
}

/// Richardson difference of `u ↦ λ_u` along `h`.
pub fn lambda_derivative_fd(
    problem: &TransferProblem,
    u0: &[f64],
    h: &[f64],
    delta: f64,
) -> Result<f64> {
    check_dim(problem.param_dim(), h.len())?;
    richardson_first_scalar(
        |s| {
            let u: Vec<f64> = u0.iter().zip(h).map(|(a, b)| a + s * b).collect();
            leading_eigenvalue(&problem.operator(&u)?, problem.tol)
        },
        delta,
    )
}

/// Central difference `(φ_{u₀+δh} − φ_{u₀−δh})/2δ` of the eigenfunction
/// normalized by `⟨ℓ_{u₀}, φ_u⟩ = 1`.
pub fn eigenfunction_fd(
    problem: &TransferProblem,
    data0: &SpectralData,
    u0: &[f64],
    h: &[f64],
    delta: f64,
) -> Result<Vec<f64>> {
    check_dim(problem.param_dim(), h.len())?;
    crate::fd::central(
        |s| {
            let u: Vec<f64> = u0.iter().zip(h).map(|(a, b)| a + s * b).collect();
            Ok(problem.data(&u, &data0.ell)?.phi.into_samples())
        },
        delta,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureCheck {
    /// Richardson difference of `s ↦ log λ(L_{s,u})` at `s = 0`.
    pub derivative: f64,
    /// `m_u(A)`.
    pub measure: f64,
    /// `|derivative − measure| / max(1, |measure|)`.
    pub relative_error: f64,
}

/// `∂_s P(0, u)` for `P(s, u) = log λ(L_u(e^{sA}·))`, compared with the Gibbs
/// expectation of `A`.
pub fn pressure_s_derivative(
    problem: &TransferProblem,
    u: &[f64],
    a: &GridFunction,
) -> Result<PressureCheck> {
    check_dim(problem.n, a.resolution())?;
    let l = problem.operator(u)?;
    let data = spectral_data(&l, &DualFunctional::lebesgue(problem.n)?, problem.tol)?;
    let derivative = richardson_first_scalar(
        |s| {
            let twisted = twisted_operator(&l, a.samples(), s)?;
            // the gap is re-certified at every twisted parameter
            let d = spectral_data(&twisted, &DualFunctional::lebesgue(problem.n)?, problem.tol)?;
            Ok(d.lambda.ln())
        },
        PRESSURE_STEP,
    )?;
    let measure = gibbs_measure(&data, a)?;
    Ok(PressureCheck {
        derivative,
        measure,
        relative_error: (derivative - measure).abs() / measure.abs().max(1.0),
    })
}

/// Gibbs expectation `m_u(A)` with `ℓ_u` recomputed at `u`.
pub fn measure_at(problem: &TransferProblem, u: &[f64], a: &GridFunction) -> Result<f64> {
    gibbs_measure(&problem.reference_data(u)?, a)
}

/// `D_u m_u(A)·h = ⟨Dℓ, Aφ₀⟩ + ⟨ℓ₀, A·Dφ⟩`, where `Dℓ` solves the adjoint
/// response equation `(Id − λ⁻¹Rᵀ) w = λ⁻¹(Id − Πᵀ)(∂_uL·h)ᵀℓ₀`.
pub fn measure_response(
    problem: &TransferProblem,
    u0: &[f64],
    h: &[f64],
    a: &GridFunction,
) -> Result<f64> {
    check_dim(problem.n, a.resolution())?;
    let resp = linear_response(problem, u0, h)?;
    let data = &resp.data;
    let phi0 = DVector::from_column_slice(data.phi.samples());
    let ell = DVector::from_column_slice(data.ell.weights());
    let dl = problem.d_operator(u0, h)?;
    let dl_t_ell = dl.tr_mul(&ell);
    let mut rhs = dl_t_ell.clone();
    add_scaled(&mut rhs, &ell, -phi0.dot(&dl_t_ell));
    rhs /= data.lambda;
    let qt = data.r.transpose() / data.lambda;
    let d_ell = DVector::from_column_slice(&solve_resolvent(&qt, rhs.as_slice())?.z);
    let av = DVector::from_column_slice(a.samples());
    let a_phi = av.component_mul(&phi0);
    let a_dphi = av.component_mul(&DVector::from_column_slice(resp.response.samples()));
    Ok(d_ell.dot(&a_phi) + ell.dot(&a_dphi))
}

/// Richardson difference of `u ↦ m_u(A)` along `h`.
pub fn measure_response_fd(
    problem: &TransferProblem,
    u0: &[f64],
    h: &[f64],
    a: &GridFunction,
    delta: f64,
) -> Result<f64> {
    check_dim(problem.param_dim(), h.len())?;
    richardson_first_scalar(
        |s| {
            let u: Vec<f64> = u0.iter().zip(h).map(|(x, y)| x + s * y).collect();
            measure_at(problem, &u, a)
        },
        delta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_point::{implicit_derivative, ParametrizedMap};
    use crate::function_spaces::sup_norm;
    use crate::transfer::family::{TrigMapFamily, TrigSeries, WeightBase};
    use std::f64::consts::PI;

    fn perturbed(n: usize) -> TransferProblem {
        TransferProblem::new(
            Arc::new(TrigMapFamily::perturbed_doubling()),
            Weight::geometric(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn u_independent_family_has_no_response() {
        let p = TransferProblem::new(
            Arc::new(TrigMapFamily::doubling_with_params(1)),
            Weight::constant(0.5),
            32,
        )
        .unwrap();
        let r = linear_response(&p, &[0.0], &[1.0]).unwrap();
        assert!(r.response.sup_norm() < 1e-14);
        assert!(lambda_derivative(&p, &[0.0], &[1.0]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn response_matches_fd_and_is_in_kernel() {
        // at u = 0 the first-order response vanishes identically
        let p = perturbed(64);
        let r = linear_response(&p, &[0.2], &[1.0]).unwrap();
        let fd = eigenfunction_fd(&p, &r.data, &[0.2], &[1.0], 1e-4).unwrap();
        let diff: Vec<f64> = fd
            .iter()
            .zip(r.response.samples())
            .map(|(a, b)| a - b)
            .collect();
        assert!(sup_norm(&diff) < 1e-4 * sup_norm(&fd));
        assert!(r.data.ell.pair(&r.response).abs() < 1e-12);
    }

    #[test]
    fn response_equals_engine_route() {
        let p = perturbed(32);
        let u0 = [0.15];
        let r = linear_response(&p, &u0, &[1.0]).unwrap();
        let f = p.normalized_map(r.data.ell.clone()).unwrap();
        let pm = f.p_operator(&u0, r.data.phi.samples()).unwrap();
        let qm = f.q_operator(&u0, r.data.phi.samples()).unwrap();
        let z = implicit_derivative(&pm, &qm, &[1.0]).unwrap();
        for (a, b) in z.iter().zip(r.response.samples()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn scaled_weight_eigenvalue_derivative() {
        let p = TransferProblem::new(
            Arc::new(TrigMapFamily::doubling_with_params(1)),
            Weight::constant(0.5).with_log_scale(vec![1.0]),
            32,
        )
        .unwrap();
        let d = lambda_derivative(&p, &[0.0], &[1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_derivative_matches_fd() {
        let w = Weight::from_base(WeightBase::Trig(TrigSeries::new(
            0.5,
            vec![0.1],
            vec![0.05],
        )));
        let p = TransferProblem::new(Arc::new(TrigMapFamily::perturbed_doubling()), w, 64).unwrap();
        let d = lambda_derivative(&p, &[0.2], &[1.0]).unwrap();
        let fd = lambda_derivative_fd(&p, &[0.2], &[1.0], 1e-4).unwrap();
        assert!((d - fd).abs() < 1e-5 * fd.abs(), "{d} {fd}");
    }

    #[test]
    fn pressure_identity() {
        let p = perturbed(64);
        let c = GridFunction::constant(64, 0.7).unwrap();
        let chk = pressure_s_derivative(&p, &[0.0], &c).unwrap();
        assert!((chk.derivative - 0.7).abs() < 1e-9);
        let dbl = TransferProblem::new(
            Arc::new(TrigMapFamily::linear(2).unwrap()),
            Weight::constant(0.5),
            32,
        )
        .unwrap();
        let s = GridFunction::from_fn(32, |x| (2.0 * PI * x).sin()).unwrap();
        let chk = pressure_s_derivative(&dbl, &[], &s).unwrap();
        assert!(chk.derivative.abs() < 1e-8);
        let a = GridFunction::from_fn(64, |x| (2.0 * PI * x).cos() + 0.3 * (4.0 * PI * x).sin())
            .unwrap();
        let chk = pressure_s_derivative(&p, &[0.3], &a).unwrap();
        assert!(chk.relative_error < 1e-6, "{chk:?}");
    }

    #[test]
    fn measure_response_matches_fd() {
        let p = perturbed(64);
        let a = GridFunction::from_fn(64, |x| (2.0 * PI * x).cos() + 0.2 * (2.0 * PI * x).sin())
            .unwrap();
        let d = measure_response(&p, &[0.1], &[1.0], &a).unwrap();
        let fd = measure_response_fd(&p, &[0.1], &[1.0], &a, 1e-4).unwrap();
        assert!((d - fd).abs() < 1e-4 * fd.abs().max(1e-3), "{d} {fd}");
        let one = GridFunction::constant(64, 1.0).unwrap();
        assert!(measure_response(&p, &[0.1], &[1.0], &one).unwrap().abs() < 1e-12);
    }
}
