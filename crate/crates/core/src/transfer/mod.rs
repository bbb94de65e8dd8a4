//! Weighted transfer operators `Lφ(x) = Σ_{T(u,y)=x} g(u,y)φ(y)` of
//! expanding circle maps, collocated on `N` equispaced nodes.
//!
//! The leading eigendata are computed by power iteration and differentiated
//! in `u` through the normalized map `F(u, φ) = L_uφ / ⟨ℓ_{u₀}, L_uφ⟩`, whose
//! linearization at the fixed point is `Q = λ⁻¹R`.

mod family;
mod holder_scan;
mod normalized;
mod operator;
mod response;
mod spectral;

pub use family::{MapFamily, Profile, TrigMapFamily, TrigSeries, Weight, WeightBase, WeightJet};
pub use holder_scan::{holder_scan_operator, unit_test_function, HolderScanReport, HolderScanRow};
pub use normalized::{normalized_map, NormalizedMap, NORMALIZATION_FLOOR};
pub use operator::{
    assemble_operator, check_expanding, d_u_operator, inverse_branches, twisted_operator,
};
pub use response::{
    eigenfunction_fd, lambda_derivative, lambda_derivative_fd, linear_response,
    linear_response_with, measure_at, measure_response, measure_response_fd, pressure_s_derivative,
    LinearResponse, PressureCheck, TransferProblem, PRESSURE_STEP,
};
pub use spectral::{
    decay_sequence, gibbs_measure, leading_eigenvalue, power_iteration, reference_spectral_data,
    spectral_data, SpectralData, POWER_MAX_ITER, POWER_TOL, SIGMA_STEPS,
};
