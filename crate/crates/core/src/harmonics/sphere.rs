//! Spherical harmonics and product quadrature on S².
//!
//! Harmonics are complex, carry the Condon-Shortley phase, and are normalized
//! against the probability measure on the sphere, so `Y₀₀ ≡ 1` and
//! `⟨Y_lm, Y_l'm'⟩ = δ_ll' δ_mm'` with `⟨f, g⟩ = ∫ conj(f) g dσ`, `σ(S²) = 1`.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::quadrature::gauss_legendre;
use super::BandLimit;

/// Flat index of `(l, m)` in a degree-ordered harmonic vector.
#[inline]
pub fn sh_index(l: usize, m: i64) -> usize {
    (l * l) as usize + (l as i64 + m) as usize
}

/// Index of `(l, m ≥ 0)` in the triangular Legendre table.
#[inline]
pub fn legendre_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `P̄_l^m(z) / (1 - z²)^{m/2}` for `0 ≤ m ≤ l ≤ lmax`, where `P̄` is the
/// associated Legendre function scaled so that `P̄_l^m(cos θ) e^{imφ}` has unit
/// norm on the sphere. Dropping the `sin^m θ` factor avoids dividing by it
/// again when assembling harmonics from Cartesian coordinates.
fn legendre_reduced(lmax: usize, z: f64) -> Vec<f64> {
    let mut p = vec![0.0; legendre_index(lmax, lmax) + 1];
    let mut diag = 1.0;
    for m in 0..=lmax {
        if m > 0 {
            diag *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        }
        p[legendre_index(m, m)] = diag;
        if m < lmax {
            p[legendre_index(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * z * diag;
        }
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[legendre_index(l, m)] = a * (z * p[legendre_index(l - 1, m)] - b * p[legendre_index(l - 2, m)]);
        }
    }
    p
}

/// Normalized associated Legendre values `P̄_l^m(cos θ)`, `m ≥ 0`, including
/// the `sin^m θ` factor.
pub fn legendre_normalized(lmax: usize, cos_theta: f64) -> Vec<f64> {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let mut p = legendre_reduced(lmax, cos_theta);
    for m in 1..=lmax {
        let s = sin_theta.powi(m as i32);
        for l in m..=lmax {
            p[legendre_index(l, m)] *= s;
        }
    }
    p
}

/// All `Y_lm(ξ)` with `l ≤ lmax`, indexed by [`sh_index`].
pub fn sh_all(lmax: usize, xi: &Vector3<f64>) -> Vec<Complex64> {
    let p = legendre_reduced(lmax, xi.z);
    let w = Complex64::new(xi.x, xi.y);
    let mut out = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
    let mut wm = Complex64::new(1.0, 0.0);
    for m in 0..=lmax {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for l in m..=lmax {
            let y = wm * p[legendre_index(l, m)];
            out[sh_index(l, m as i64)] = y;
            if m > 0 {
                out[sh_index(l, -(m as i64))] = y.conj() * sign;
            }
        }
        wm *= w;
    }
    out
}

/// `Y_lm(ξ)` for a unit vector `ξ`.
pub fn sh_eval(l: usize, m: i64, xi: &Vector3<f64>) -> Complex64 {
    assert!(m.unsigned_abs() as usize <= l, "|m| must not exceed l");
    sh_all(l, xi)[sh_index(l, m)]
}

/// Product rule on S²: Gauss-Legendre in `cos θ` times equispaced azimuths.
/// Weights are normalized to sum to one.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    /// Polar-angle cosines of the Gauss-Legendre rings.
    pub ring_cos: Vec<f64>,
    /// Ring weights, summing to one.
    pub ring_weights: Vec<f64>,
    pub n_phi: usize,
    pub degree: usize,
}

impl SphereQuadrature {
    /// Rule exact for spherical polynomials of degree `≤ degree`.
    pub fn with_degree(degree: usize) -> Self {
        let n_theta = degree / 2 + 1;
        let n_phi = degree + 1;
        let (z, wz) = gauss_legendre(n_theta);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (zc, wc) in z.iter().zip(&wz) {
            let s = (1.0 - zc * zc).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = TAU * j as f64 / n_phi as f64;
                nodes.push(Vector3::new(s * phi.cos(), s * phi.sin(), *zc));
                weights.push(0.5 * wc / n_phi as f64);
            }
        }
        Self {
            nodes,
            weights,
            ring_cos: z,
            ring_weights: wz.iter().map(|w| 0.5 * w).collect(),
            n_phi,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(&Vector3<f64>) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(x) * *w).sum()
    }
}

/// Rule exact to degree `2L + margin`.
pub fn sphere_quadrature(band: BandLimit, margin: usize) -> SphereQuadrature {
    SphereQuadrature::with_degree(2 * band.l() + margin)
}
