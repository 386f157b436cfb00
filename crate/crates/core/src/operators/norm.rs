//! Largest singular value of a dense complex matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{gaussian, SeedStream};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Power,
    Dense,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Power => "power",
            NormMethod::Dense => "dense",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// `‖A*A u − λ u‖` for the returned unit vector `u` (dense: `‖A u − λ u‖`
    /// for Hermitian input).
    pub residual: f64,
    pub iterations: usize,
    pub method: NormMethod,
}

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    pub seed: u64,
    /// Relative change of the Rayleigh quotient at which iteration stops.
    pub tolerance: f64,
    /// Largest eigen-residual accepted from power iteration.
    pub accept_residual: f64,
    pub max_iterations: usize,
    /// Matrices up to this dimension go straight to the dense solver.
    pub dense_limit: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { seed: 0, tolerance: 1e-12, accept_residual: 1e-10, max_iterations: 10_000, dense_limit: 512 }
    }
}

/// Hermiticity defect `max |A − A*|`.
pub fn hermitian_residual(a: &DMatrix<C>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &DMatrix<C>) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Operator 2-norm with default options.
pub fn operator_norm(a: &DMatrix<C>) -> Result<NormEstimate> {
    operator_norm_with(a, &NormOptions::default())
}

pub fn operator_norm_with(a: &DMatrix<C>, opts: &NormOptions) -> Result<NormEstimate> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!("operator_norm needs a square matrix, got {:?}", a.shape())));
    }
    if a.nrows() == 0 {
        return Ok(NormEstimate { value: 0.0, residual: 0.0, iterations: 0, method: NormMethod::Dense });
    }
    if a.nrows() <= opts.dense_limit {
        return dense_norm(a);
    }
    match power_norm(a, opts) {
        Ok(est) => Ok(est),
        Err(_) => dense_norm(a),
    }
}

/// Dense eigensolve: eigenvalues of `A` when Hermitian, else of `A*A`. The
/// residual comes from a top eigenvector found by inverse iteration.
pub fn dense_norm(a: &DMatrix<C>) -> Result<NormEstimate> {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let hermitian = hermitian_residual(a) <= 1e-12 * scale.max(1.0);
    let target = if hermitian { a.clone() } else { a.adjoint() * a };
    let values = target.clone().symmetric_eigenvalues();
    let lambda = values.iter().copied().fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
    if !lambda.is_finite() {
        return Err(Error::NormNotConverged(f64::NAN));
    }
    let residual = eigen_residual(&target, lambda);
    let value = if hermitian { lambda.abs() } else { lambda.max(0.0).sqrt() };
    Ok(NormEstimate { value, residual, iterations: 1, method: NormMethod::Dense })
}

/// `‖A u − λ u‖` for a unit vector `u` from two steps of shifted inverse
/// iteration.
fn eigen_residual(a: &DMatrix<C>, lambda: f64) -> f64 {
    let n = a.nrows();
    if n == 1 {
        return (a[(0, 0)] - C::new(lambda, 0.0)).norm();
    }
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let lu = (a - DMatrix::<C>::identity(n, n) * C::new(shift, 0.0)).lu();
    let mut u = DVector::<C>::from_fn(n, |i, _| C::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    for _ in 0..2 {
        match lu.solve(&u) {
            Some(y) if y.norm() > 0.0 && y.norm().is_finite() => u = &y / C::new(y.norm(), 0.0),
            _ => break,
        }
    }
    (a * &u - &u * C::new(lambda, 0.0)).norm()
}

/// Power iteration on `A*A` from a seeded Gaussian start.
pub fn power_norm(a: &DMatrix<C>, opts: &NormOptions) -> Result<NormEstimate> {
    let n = a.nrows();
    let mut rng = SeedStream::new(opts.seed).rng(0x6e6f726d);
    let mut x = DVector::<C>::from_fn(n, |_, _| C::new(gaussian(&mut rng), gaussian(&mut rng)));
    x /= C::new(x.norm(), 0.0);
    let adj = a.adjoint();
    let mut rho_prev = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let z = &adj * (a * &x);
        let rho = x.dotc(&z).re;
        residual = (&z - &x * C::new(rho, 0.0)).norm();
        let zn = z.norm();
        if zn == 0.0 {
            return Ok(NormEstimate { value: 0.0, residual: 0.0, iterations: it, method: NormMethod::Power });
        }
        let settled = (rho - rho_prev).abs() <= opts.tolerance * rho.abs();
        if settled && residual <= opts.accept_residual {
            return Ok(NormEstimate { value: rho.max(0.0).sqrt(), residual, iterations: it, method: NormMethod::Power });
        }
        rho_prev = rho;
        x = z / C::new(zn, 0.0);
    }
    Err(Error::NormNotConverged(residual))
}
