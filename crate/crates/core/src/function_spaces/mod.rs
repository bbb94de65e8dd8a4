//! Periodic and interval function representations, differentiation,
//! composition and Hölder-norm surrogates.

mod grid;
mod holder;
mod interval;

pub use grid::{
    circle_distance, interpolation_row, interpolation_rows_with_derivative, node, nodes,
    DualFunctional, GridFunction,
};
pub use holder::{
    check_interpolation_inequality, cr_norm, cr_norm_seeded, cr_value, holder_seminorm,
    holder_seminorm_seeded, interpolation_constant, interpolation_sides, split_regularity,
    HolderNormReport, HolderSampled, DEFAULT_SEED,
};
pub use interval::{IntervalBasis, IntervalFunction, IntervalGrid};

pub(crate) use grid::{check_resolution, sup_norm};
