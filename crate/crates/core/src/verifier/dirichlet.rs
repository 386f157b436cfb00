//! The Dirichlet-form identity and its two-sided bounds on `L²(SO(3))`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::AtomicMeasure;
use crate::harmonics::BandLimit;
use crate::operators::assembly::{e, quadrature_degree};
use crate::operators::{euler_quadrature, pw_eval, so3_operator};
use crate::rng::{gaussian, SeedStream};

use super::Bound;

type C = Complex64;

/// Seeded complex Gaussian coefficient vectors of unit norm.
pub fn random_coefficients(band: BandLimit, count: usize, seed: u64) -> Vec<DVector<C>> {
    let stream = SeedStream::new(seed);
    (0..count)
        .map(|j| {
            let mut rng = stream.rng(0x7068_6900 + j as u64);
            let v = DVector::<C>::from_fn(band.so3_dim(), |_, _| C::new(gaussian(&mut rng), gaussian(&mut rng)));
            let n = v.norm();
            v / C::new(n, 0.0)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletPoint {
    pub x: [f64; 3],
    /// Largest `|Σ_g w_g ‖π_x(g)φ − φ‖² − ⟨(2 − 2T_x)φ, φ⟩|` over the samples.
    pub identity_residual: f64,
    /// Tightest sample of `2c₀ min(|x|²,1)‖φ‖² − 1e−6 ≤ Σ_g w_g ‖π_x(g)φ − φ‖²`.
    pub lower: Bound,
    /// Tightest sample and translation of `‖π_x(v)φ − φ‖² ≤ c₁ min(|x|²,1)‖φ‖²`.
    pub upper: Bound,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletReport {
    pub c0: f64,
    pub c1: f64,
    pub kappa: f64,
    pub degree: usize,
    pub points: Vec<DirichletPoint>,
    pub identity_passed: bool,
    pub lower_passed: bool,
    pub upper_passed: bool,
}

/// Evaluates both sides of the identity for each `x` and each coefficient
/// vector. The left side is summed pointwise over an Euler-angle rule; the
/// right side uses the assembled matrix of `T_x`. The translation probes are
/// the translation parts of the atoms of `ν`.
pub fn dirichlet_check(
    nu: &AtomicMeasure,
    c0: f64,
    grid: &[Vector3<f64>],
    samples: &[DVector<C>],
    band: BandLimit,
    margin: usize,
) -> Result<DirichletReport> {
    if !nu.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let dim = band.so3_dim();
    if samples.iter().any(|c| c.len() != dim) {
        return Err(Error::InvalidArgument(format!("coefficient vectors must have length {dim}")));
    }
    let kappa = nu.moments().max_radius;
    let c1 = (4.0 * PI * PI * kappa * kappa).max(4.0);
    let r_max = grid.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let degree = quadrature_degree(band, margin, TAU * r_max * kappa);
    let (nodes, wq) = euler_quadrature(degree);

    let coeffs = DMatrix::<C>::from_columns(samples);
    let values_at = |rot: &dyn Fn(&nalgebra::Matrix3<f64>) -> nalgebra::Matrix3<f64>| -> DMatrix<C> {
        let b = DMatrix::<C>::from_fn(nodes.len(), dim, |_, _| C::new(0.0, 0.0));
        let mut b = b;
        for (k, om) in nodes.iter().enumerate() {
            for (i, z) in pw_eval(band, &rot(om)).into_iter().enumerate() {
                b[(k, i)] = z;
            }
        }
        b * &coeffs
    };
    let phi = values_at(&|om| *om);
    let moved: Vec<DMatrix<C>> = nu
        .atoms()
        .iter()
        .map(|(g, _)| {
            let inv = g.rotation().transpose();
            values_at(&move |om| inv * om)
        })
        .collect();
    let sq_norms: Vec<f64> = samples.iter().map(|c| c.norm_squared()).collect();

    let mut points = Vec::with_capacity(grid.len());
    for x in grid {
        let scale = x.norm_squared().min(1.0);
        let t = so3_operator(nu, x, band, margin).matrix;
        let ox: Vec<_> = nodes.iter().map(|om| om * x).collect();
        let mut identity_residual = 0.0f64;
        let mut lower: Option<Bound> = None;
        let mut upper: Option<Bound> = None;
        for (j, c) in samples.iter().enumerate() {
            let rhs = 2.0 * sq_norms[j] - 2.0 * c.dotc(&(&t * c)).re;
            let mut lhs = 0.0;
            for ((g, w), pg) in nu.atoms().iter().zip(&moved) {
                let mut s = 0.0;
                for k in 0..nodes.len() {
                    s += wq[k] * (e(ox[k].dot(g.translation())) * pg[(k, j)] - phi[(k, j)]).norm_sqr();
                }
                lhs += w * s;
            }
            identity_residual = identity_residual.max((lhs - rhs).abs());
            let lo = Bound::le(2.0 * c0 * scale * sq_norms[j] - 1e-6, lhs);
            if lower.is_none_or(|b| lo.slack < b.slack) {
                lower = Some(lo);
            }
            for (g, _) in nu.atoms() {
                let v = g.translation();
                let mut s = 0.0;
                for k in 0..nodes.len() {
                    s += wq[k] * (e(ox[k].dot(v)) - C::new(1.0, 0.0)).norm_sqr() * phi[(k, j)].norm_sqr();
                }
                let up = Bound::le(s, c1 * scale * sq_norms[j] + 1e-12);
                if upper.is_none_or(|b| up.slack < b.slack) {
                    upper = Some(up);
                }
            }
        }
        points.push(DirichletPoint {
            x: [x.x, x.y, x.z],
            identity_residual,
            lower: lower.unwrap_or(Bound::le(0.0, 0.0)),
            upper: upper.unwrap_or(Bound::le(0.0, 0.0)),
        });
    }
    Ok(DirichletReport {
        c0,
        c1,
        kappa,
        degree,
        identity_passed: points.iter().all(|p| p.identity_residual <= 1e-9),
        lower_passed: points.iter().all(|p| p.lower.passed),
        upper_passed: points.iter().all(|p| p.upper.passed),
        points,
    })
}
