use crate::error::{Error, Result};
use crate::OperatorMatrix;

/// A norm on state vectors.
pub type Norm = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A map `F(u, φ)` on a finite-dimensional realization of a scale of spaces,
/// together with (optionally) the analytic coefficients of its first-order
/// development `F(u₀+h, φ₀+z) − F(u₀, φ₀) = P h + Q z + o(‖h‖ + ‖z‖)`.
pub trait ParametrizedMap: Send + Sync {
    fn state_dim(&self) -> usize;
    fn param_dim(&self) -> usize;

    /// Must be deterministic: identical inputs give bit-identical outputs.
    fn apply(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>>;

    /// `P_{u,φ}`, a `state_dim × param_dim` matrix.
    fn p_operator(&self, _u: &[f64], _phi: &[f64]) -> Result<OperatorMatrix> {
        Err(Error::MissingCoefficient("P"))
    }

    /// `Q_{u,φ}`, a `state_dim × state_dim` matrix.
    fn q_operator(&self, _u: &[f64], _phi: &[f64]) -> Result<OperatorMatrix> {
        Err(Error::MissingCoefficient("Q"))
    }
}

/// Second-order coefficients of a 2-graded family. Each coefficient is the
/// symmetric multilinear form obtained by differentiating `F` twice, so the
/// second-order term of the development is
/// `½ Q⁽²'⁰⁾[h,h] + Q⁽¹'¹⁾[h,z] + ½ Q⁽⁰'²⁾[z,z]`.
pub trait GradedMap: ParametrizedMap {
    /// `∂²_u F [h1, h2]`.
    fn q20(&self, _u: &[f64], _phi: &[f64], _h1: &[f64], _h2: &[f64]) -> Result<Vec<f64>> {
        Err(Error::MissingCoefficient("Q(2,0)"))
    }

    /// `∂_u ∂_φ F [h, z]`.
    fn q11(&self, _u: &[f64], _phi: &[f64], _h: &[f64], _z: &[f64]) -> Result<Vec<f64>> {
        Err(Error::MissingCoefficient("Q(1,1)"))
    }

    /// `∂²_φ F [z, w]`.
    fn q02(&self, _u: &[f64], _phi: &[f64], _z: &[f64], _w: &[f64]) -> Result<Vec<f64>> {
        Err(Error::MissingCoefficient("Q(0,2)"))
    }
}

type ApplyFn = dyn Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Send + Sync;
type MatrixFn = dyn Fn(&[f64], &[f64]) -> OperatorMatrix + Send + Sync;

/// A [`ParametrizedMap`] assembled from closures.
pub struct ClosureMap {
    state_dim: usize,
    param_dim: usize,
    apply: Box<ApplyFn>,
    p: Option<Box<MatrixFn>>,
    q: Option<Box<MatrixFn>>,
}

impl ClosureMap {
    pub fn new(
        state_dim: usize,
        param_dim: usize,
        apply: impl Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            state_dim,
            param_dim,
            apply: Box::new(apply),
            p: None,
            q: None,
        }
    }

    pub fn with_p(
        mut self,
        p: impl Fn(&[f64], &[f64]) -> OperatorMatrix + Send + Sync + 'static,
    ) -> Self {
        self.p = Some(Box::new(p));
        self
    }

    pub fn with_q(
        mut self,
        q: impl Fn(&[f64], &[f64]) -> OperatorMatrix + Send + Sync + 'static,
    ) -> Self {
        self.q = Some(Box::new(q));
        self
    }
}

impl ParametrizedMap for ClosureMap {
    fn state_dim(&self) -> usize {
        self.state_dim
    }

    fn param_dim(&self) -> usize {
        self.param_dim
    }

    fn apply(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_dim(self.param_dim, u.len())?;
        crate::error::check_dim(self.state_dim, phi.len())?;
        (self.apply)(u, phi)
    }

    fn p_operator(&self, u: &[f64], phi: &[f64]) -> Result<OperatorMatrix> {
        self.p
            .as_ref()
            .map(|p| p(u, phi))
            .ok_or(Error::MissingCoefficient("P"))
    }

    fn q_operator(&self, u: &[f64], phi: &[f64]) -> Result<OperatorMatrix> {
        self.q
            .as_ref()
            .map(|q| q(u, phi))
            .ok_or(Error::MissingCoefficient("Q"))
    }
}

impl GradedMap for ClosureMap {}

/// Two levels of a scale realized on the same sample vectors: the injection
/// is the identity and only the norm changes.
pub struct ScalePair {
    fine: Box<Norm>,
    coarse: Box<Norm>,
}

impl ScalePair {
    pub fn new(
        fine: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        coarse: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            fine: Box::new(fine),
            coarse: Box::new(coarse),
        }
    }

    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }

    pub fn fine_norm(&self, z: &[f64]) -> f64 {
        (self.fine)(z)
    }

    pub fn coarse_norm(&self, z: &[f64]) -> f64 {
        (self.coarse)(z)
    }

    pub fn coarse(&self) -> &Norm {
        self.coarse.as_ref()
    }

    /// Empirical constant `C` in `‖j z‖_coarse ≤ C ‖z‖_fine` over `samples`.
    pub fn embedding_constant(&self, samples: &[Vec<f64>]) -> f64 {
        samples
            .iter()
            .filter_map(|z| {
                let f = self.fine_norm(z);
                (f > 0.0).then(|| self.coarse_norm(&self.project(z)) / f)
            })
            .fold(0.0, f64::max)
    }
}

pub fn sup_norm(z: &[f64]) -> f64 {
    crate::function_spaces::sup_norm(z)
}

pub fn euclidean_norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>().sqrt()
}
