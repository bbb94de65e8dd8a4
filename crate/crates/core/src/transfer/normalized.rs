use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::family::{MapFamily, Weight};
use super::operator::{assemble_operator, d_u_operator};
use crate::error::{check_dim, Error, Result};
use crate::fixed_point::ParametrizedMap;
use crate::function_spaces::DualFunctional;
use crate::OperatorMatrix;

/// Below this `|⟨ℓ_ref, L_uφ⟩|` the normalization is rejected.
pub const NORMALIZATION_FLOOR: f64 = 1e-13;

/// `F(u, φ) = L_uφ / ⟨ℓ_ref, L_uφ⟩`.
pub struct NormalizedMap {
    map: Arc<dyn MapFamily>,
    weight: Weight,
    n: usize,
    ell_ref: DualFunctional,
}

/// `F` as returned by [`normalized_map`].
pub fn normalized_map(
    map: Arc<dyn MapFamily>,
    weight: Weight,
    n: usize,
    ell_ref: DualFunctional,
) -> Result<NormalizedMap> {
    crate::function_spaces::check_resolution(n)?;
    check_dim(n, ell_ref.resolution())?;
    weight.check_params(map.param_dim())?;
    Ok(NormalizedMap {
        map,
        weight,
        n,
        ell_ref,
    })
}

impl NormalizedMap {
    pub fn operator(&self, u: &[f64]) -> Result<OperatorMatrix> {
        assemble_operator(self.map.as_ref(), &self.weight, u, self.n)
    }

    pub fn ell_ref(&self) -> &DualFunctional {
        &self.ell_ref
    }

    fn pairing(&self, lphi: &DVector<f64>) -> Result<f64> {
        let c = self.ell_ref.pair_samples(lphi.as_slice());
        if c.abs() < NORMALIZATION_FLOOR {
            return Err(Error::NormalizationVanishes { value: c });
        }
        Ok(c)
    }

    /// `F^k(u, φ)` computed as `L^kφ / ⟨ℓ_ref, L^kφ⟩`.
    pub fn iterate_closed_form(&self, u: &[f64], phi: &[f64], k: usize) -> Result<Vec<f64>> {
        let l = self.operator(u)?;
        let mut v = DVector::from_column_slice(phi);
        for _ in 0..k {
            v = &l * v;
        }
        let c = self.pairing(&v)?;
        Ok((v / c).as_slice().to_vec())
    }
}

impl ParametrizedMap for NormalizedMap {
    fn state_dim(&self) -> usize {
        self.n
    }

    fn param_dim(&self) -> usize {
        self.map.param_dim()
    }

    fn apply(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, phi.len())?;
        let lphi = self.operator(u)? * DVector::from_column_slice(phi);
        let c = self.pairing(&lphi)?;
        Ok((lphi / c).as_slice().to_vec())
    }

    /// Column `i` is `(∂_iL)φ/c − ⟨ℓ_ref, (∂_iL)φ⟩·Lφ/c²` with `c = ⟨ℓ_ref, Lφ⟩`.
    fn p_operator(&self, u: &[f64], phi: &[f64]) -> Result<OperatorMatrix> {
        check_dim(self.n, phi.len())?;
        let p = self.param_dim();
        let phi = DVector::from_column_slice(phi);
        let lphi = self.operator(u)? * &phi;
        let c = self.pairing(&lphi)?;
        let mut out = DMatrix::zeros(self.n, p);
        for i in 0..p {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            let dl = d_u_operator(self.map.as_ref(), &self.weight, u, &e, self.n)? * &phi;
            let dc = self.ell_ref.pair_samples(dl.as_slice());
            let col = dl / c - &lphi * (dc / (c * c));
            out.set_column(i, &col);
        }
        Ok(out)
    }

    /// `Q z = [⟨ℓ,Lφ⟩Lz − ⟨ℓ,Lz⟩Lφ]/⟨ℓ,Lφ⟩²`.
    fn q_operator(&self, u: &[f64], phi: &[f64]) -> Result<OperatorMatrix> {
        check_dim(self.n, phi.len())?;
        let l = self.operator(u)?;
        let lphi = &l * DVector::from_column_slice(phi);
        let c = self.pairing(&lphi)?;
        let ell = DVector::from_column_slice(self.ell_ref.weights());
        let ell_l = l.tr_mul(&ell);
        Ok(&l / c - &lphi * ell_l.transpose() / (c * c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::family::TrigMapFamily;
    use crate::transfer::spectral::{reference_spectral_data, POWER_TOL};

    fn setup(n: usize) -> (NormalizedMap, crate::transfer::spectral::SpectralData) {
        let t: Arc<dyn MapFamily> = Arc::new(TrigMapFamily::perturbed_doubling());
        let w = Weight::geometric();
        let l = assemble_operator(t.as_ref(), &w, &[0.2], n).unwrap();
        let d = reference_spectral_data(&l, POWER_TOL).unwrap();
        (normalized_map(t, w, n, d.ell.clone()).unwrap(), d)
    }

    #[test]
    fn eigenvector_is_fixed() {
        let (f, d) = setup(32);
        let out = f.apply(&[0.2], d.phi.samples()).unwrap();
        for (a, b) in out.iter().zip(d.phi.samples()) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn q_at_fixed_point_is_scaled_remainder() {
        let (f, d) = setup(32);
        let q = f.q_operator(&[0.2], d.phi.samples()).unwrap();
        assert!((q - &d.r / d.lambda).amax() < 1e-10);
    }

    #[test]
    fn iterates_have_closed_form() {
        let (f, _) = setup(32);
        let phi: Vec<f64> = (0..32)
            .map(|j| 1.0 + 0.5 * ((j * 7 % 11) as f64 / 11.0))
            .collect();
        let mut it = phi.clone();
        for _ in 0..3 {
            it = f.apply(&[0.25], &it).unwrap();
        }
        let closed = f.iterate_closed_form(&[0.25], &phi, 3).unwrap();
        for (a, b) in it.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn vanishing_normalization() {
        let (f, _) = setup(16);
        let err = f.apply(&[0.2], &[0.0; 16]).unwrap_err();
        assert!(matches!(err, Error::NormalizationVanishes { .. }));
    }
}
