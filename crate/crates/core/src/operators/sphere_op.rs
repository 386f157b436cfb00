//! `S_r` on spherical harmonics.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::group::AtomicMeasure;
use crate::harmonics::sphere::{legendre_index, legendre_normalized};
use crate::harmonics::{wigner_d_all, BandLimit, SphereQuadrature};

use super::assembly::{ordered_sum, quadrature_degree, right_multiply_blocks, ring_phase_dft, ring_product};
use super::{BandLimitedOperator, Basis, Parameter};

type C = Complex64;

/// Matrix of `S_r` on `{Y_lm}_{l≤L}`: `Σ_g w_g E_g(r) ⊕_l D^l(θ(g))`, where
/// `E_g(r)` is multiplication by `e(r⟨ξ, v(g)⟩)`, evaluated on a product rule
/// exact to degree `2L + max(margin, plane-wave degree)`.
pub fn sphere_operator(mu: &AtomicMeasure, r: f64, band: BandLimit, margin: usize) -> BandLimitedOperator {
    let lmax = band.l();
    let dim = band.sphere_dim();
    let kappa = mu.moments().max_radius;
    let degree = quadrature_degree(band, margin, TAU * r.abs() * kappa);
    let q = SphereQuadrature::with_degree(degree);

    let mut ms = Vec::with_capacity(dim);
    let mut groups = Vec::with_capacity(lmax + 1);
    for l in 0..=lmax {
        groups.push((l, l * l));
        for m in -(l as i64)..=l as i64 {
            ms.push(m);
        }
    }
    let profiles: Vec<Vec<f64>> = q
        .ring_cos
        .iter()
        .map(|&z| {
            let p = legendre_normalized(lmax, z);
            let mut out = Vec::with_capacity(dim);
            for l in 0..=lmax {
                for m in -(l as i64)..=l as i64 {
                    let v = p[legendre_index(l, m.unsigned_abs() as usize)];
                    out.push(if m < 0 && m % 2 != 0 { -v } else { v });
                }
            }
            out
        })
        .collect();

    let pmax = 2 * lmax;
    let atoms = mu.atoms();
    let matrix = ordered_sum(atoms.len(), dim, dim, |i| {
        let (g, w) = &atoms[i];
        let phases = ring_phase_dft(&q.ring_cos, q.n_phi, g.translation(), r, pmax);
        let e = ring_product(&profiles, &ms, &q.ring_weights, &phases, pmax);
        right_multiply_blocks(&e, &groups, &wigner_d_all(lmax, g.rotation())) * C::new(*w, 0.0)
    });
    BandLimitedOperator {
        matrix,
        basis: Basis::Sphere,
        band,
        parameter: Parameter::Radius(r),
        margin,
        degree,
        label: mu.label().to_string(),
    }
}

/// Embeds per-degree blocks into the sphere basis.
pub(crate) fn block_diagonal(blocks: &[DMatrix<C>]) -> DMatrix<C> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::<C>::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}
