//! Checks of the large-`|x|` and small-`|x|` norm bounds and of the
//! comparison between the sphere and rotation-group models.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix3, UnitQuaternion, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{convolve, AtomicMeasure};
use crate::harmonics::{bessel_j, BandLimit};
use crate::operators::{
    max_abs_diff, operator_norm_with, sigma_matrix, so3_norm, so3_operator, sphere_operator, NormOptions,
};

use super::Bound;

type C = Complex64;

/// Largest Peter-Weyl dimension assembled in full by the checks; larger
/// bands go through the axial splitting.
pub const FULL_ASSEMBLY_MAX_DIM: usize = 1024;

fn dense_opts() -> NormOptions {
    NormOptions { dense_limit: FULL_ASSEMBLY_MAX_DIM, ..Default::default() }
}

/// `Σ_g μ̃(g) j₀(2π|x||v(g)|)` with `μ̃ = μ̌ * μ`, the value of `‖T_x 1‖²`.
pub fn constants_oracle(mu: &AtomicMeasure, x: &Vector3<f64>) -> Result<f64> {
    let tilde = convolve(&mu.reverse(), mu)?;
    let t = TAU * x.norm();
    Ok(tilde.atoms().iter().map(|(g, w)| w * bessel_j(0, t * g.translation().norm())).sum())
}

/// `‖T_x1‖²` read off the assembled matrix: the squared norm of the column
/// of the constant basis function.
pub fn constants_matrix_value(mu: &AtomicMeasure, x: &Vector3<f64>, band: BandLimit, margin: usize) -> f64 {
    so3_operator(mu, x, band, margin).matrix.column(0).norm_squared()
}

/// A rotation taking `a` to `b` (equal lengths assumed); the identity when
/// either is zero or they already agree.
pub fn rotation_between(a: &Vector3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Matrix3::identity();
    }
    match UnitQuaternion::rotation_between(a, b) {
        Some(q) => q.to_rotation_matrix().into_inner(),
        None => {
            // antiparallel: half turn about any axis orthogonal to a
            let helper = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            let axis = nalgebra::Unit::new_normalize(a.cross(&helper));
            UnitQuaternion::from_axis_angle(&axis, PI).to_rotation_matrix().into_inner()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugationReport {
    pub norm_a: f64,
    pub norm_b: f64,
    pub norm_difference: f64,
    /// `max |T_b − Σ(h) T_a Σ(h)⁻¹|`.
    pub matrix_residual: f64,
    pub passed: bool,
}

/// `‖T_a‖ = ‖T_b‖` for `|a| = |b|`, through `T_b = Σ(h) T_a Σ(h)⁻¹` with
/// `h a = b` and `Σ` the right regular action.
pub fn conjugation_check(
    mu: &AtomicMeasure,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    band: BandLimit,
    margin: usize,
) -> Result<ConjugationReport> {
    if (a.norm() - b.norm()).abs() > 1e-10 {
        return Err(Error::RadiiDiffer(a.norm(), b.norm()));
    }
    let ta = so3_operator(mu, a, band, margin);
    let tb = if a == b { ta.clone() } else { so3_operator(mu, b, band, margin) };
    let s = if a == b {
        DMatrix::identity(ta.dim(), ta.dim())
    } else {
        sigma_matrix(&rotation_between(a, b), band)
    };
    let matrix_residual = max_abs_diff(&tb.matrix, &(&s * &ta.matrix * s.adjoint()));
    let norm_a = operator_norm_with(&ta.matrix, &dense_opts())?.value;
    let norm_b = operator_norm_with(&tb.matrix, &dense_opts())?.value;
    let norm_difference = (norm_a - norm_b).abs();
    Ok(ConjugationReport {
        norm_a,
        norm_b,
        norm_difference,
        matrix_residual,
        passed: norm_difference <= 1e-6 && matrix_residual <= 1e-6,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialDominationReport {
    pub s_norm: f64,
    pub t_norm: f64,
    /// `‖S_{|x|}‖ − ‖T_x‖`.
    pub difference: f64,
    /// `full` or `axial`.
    pub t_method: &'static str,
    pub passed: bool,
}

/// `‖S_{|x|}‖ ≤ ‖T_x‖`. `T_x` is assembled in full up to
/// [`FULL_ASSEMBLY_MAX_DIM`]; beyond it the norm comes from `T_{|x|ẑ}`.
pub fn radial_domination_check(
    mu: &AtomicMeasure,
    x: &Vector3<f64>,
    band: BandLimit,
    margin: usize,
) -> Result<RadialDominationReport> {
    let s_norm = sphere_operator(mu, x.norm(), band, margin).norm()?.value;
    let (t_norm, t_method) = if band.so3_dim() <= FULL_ASSEMBLY_MAX_DIM {
        (operator_norm_with(&so3_operator(mu, x, band, margin).matrix, &dense_opts())?.value, "full")
    } else {
        (so3_norm(mu, x, band, margin)?.value, "axial")
    };
    let difference = s_norm - t_norm;
    Ok(RadialDominationReport { s_norm, t_norm, difference, t_method, passed: difference <= 1e-6 })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallXPoint {
    pub x: [f64; 3],
    /// `‖T_x − T_0‖ ≤ 2π C^{1/2} |x|`.
    pub difference_bound: Bound,
    /// `‖T_x² 1 − 1‖ ≤ 8π² C |x|²`.
    pub second_order_bound: Bound,
    /// `‖T_x 1‖² ≤ 1 − (2π²C/3)|x|²`.
    pub constants_bound: Bound,
    /// `lhs / rhs` of the difference bound (without tolerance).
    pub difference_ratio: f64,
    pub oracle: f64,
    pub oracle_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallXReport {
    pub c: f64,
    pub points: Vec<SmallXPoint>,
    /// Number of leading grid points on which the constants bound holds.
    pub prefix_len: usize,
    pub threshold: f64,
    pub passed: bool,
}

/// The three small-`|x|` inequalities on the truncated operators. The grid
/// is taken in the given order; the constants bound is required on its
/// longest prefix, whose last radius is reported as the threshold.
pub fn small_x_check(mu: &AtomicMeasure, grid: &[Vector3<f64>], band: BandLimit, margin: usize) -> Result<SmallXReport> {
    if !mu.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let m = mu.moments();
    let mean = m.mean_translation.norm();
    if mean > 1e-8 {
        return Err(Error::NotCentered(mean));
    }
    if m.c <= 0.0 {
        return Err(Error::InvalidMeasure("no atom has a nonzero translation".into()));
    }
    let c = m.c;
    const TOL: f64 = 1e-8;
    let t0 = so3_operator(mu, &Vector3::zeros(), band, margin).matrix;
    let dim = t0.nrows();
    let one = DVector::<C>::from_fn(dim, |i, _| if i == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
    let mut points = Vec::with_capacity(grid.len());
    for x in grid {
        let r = x.norm();
        let tx = so3_operator(mu, x, band, margin).matrix;
        let diff: DMatrix<C> = &tx - &t0;
        let lhs1 = operator_norm_with(&diff, &dense_opts())?.value;
        let rhs1 = TAU * c.sqrt() * r;
        let t1 = &tx * &one;
        let lhs2 = (&tx * &t1 - &one).norm();
        let lhs3 = t1.norm_squared();
        let oracle = constants_oracle(mu, x)?;
        points.push(SmallXPoint {
            x: [x.x, x.y, x.z],
            difference_bound: Bound::le(lhs1, rhs1 + TOL),
            second_order_bound: Bound::le(lhs2, 8.0 * PI * PI * c * r * r + TOL),
            constants_bound: Bound::le(lhs3, 1.0 - 2.0 * PI * PI * c / 3.0 * r * r + TOL),
            difference_ratio: if rhs1 > 0.0 { lhs1 / rhs1 } else { 0.0 },
            oracle,
            oracle_error: (lhs3 - oracle).abs(),
        });
    }
    let prefix_len = points.iter().take_while(|p| p.constants_bound.passed).count();
    let threshold = if prefix_len == 0 { 0.0 } else { grid[prefix_len - 1].norm() };
    let passed = prefix_len > 0
        && threshold > 0.0
        && points.iter().all(|p| p.difference_bound.passed && p.second_order_bound.passed);
    Ok(SmallXReport { c, points, prefix_len, threshold, passed })
}
