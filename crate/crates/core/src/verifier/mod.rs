//! Numerical checks of the gap hypotheses, the norm bounds for `T_x` and the
//! reduction to a centered, truncated measure, plus the gap profile
//! `r ↦ 1 − ‖S_r‖`.

pub mod checks;
pub mod dirichlet;
pub mod preflight;
pub mod profile;
pub mod reduction;

use serde::Serialize;

pub use checks::{
    constants_matrix_value, constants_oracle, conjugation_check, radial_domination_check, rotation_between, small_x_check,
    ConjugationReport, RadialDominationReport, SmallXPoint, SmallXReport,
};
pub use dirichlet::{dirichlet_check, random_coefficients, DirichletPoint, DirichletReport};
pub use preflight::preflight;
pub use profile::{
    default_grid, fit_c0, gap_profile, profile_csv, small_r_exponent, C0Fit, GapProfile, ProfilePoint,
};
pub use reduction::{reduction_pipeline, reduction_pipeline_at, ReductionReport, PROBE_RADII};

/// One inequality `lhs ≤ rhs`, with `slack = rhs − lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

impl Bound {
    pub fn le(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, slack: rhs - lhs, passed: lhs <= rhs }
    }
}
