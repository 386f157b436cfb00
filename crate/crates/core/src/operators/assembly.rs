//! Shared pieces of the quadrature assembly: degree selection, azimuthal
//! Fourier coefficients of the phase symbol, and the ring-factored product.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::harmonics::{plane_wave_degree, BandLimit};

type C = Complex64;

/// Quadrature degree for band `L`: `2L` for the basis product plus the larger
/// of `margin` and the effective degree of a plane wave of argument `t`.
pub fn quadrature_degree(band: BandLimit, margin: usize, t: f64) -> usize {
    2 * band.l() + margin.max(plane_wave_degree(t))
}

/// `e(y) = exp(−2πi y)`.
#[inline]
pub fn e(y: f64) -> C {
    C::from_polar(1.0, -TAU * y)
}

/// Azimuthal Fourier coefficients `F(p) = (1/N) Σ_j e^{−ipφ_j} e(r⟨ξ_j, v⟩)`
/// on each ring `cos θ = z`, for `|p| ≤ pmax`. Indexed `[ring][p + pmax]`.
pub fn ring_phase_dft(ring_cos: &[f64], n_phi: usize, v: &Vector3<f64>, r: f64, pmax: usize) -> Vec<Vec<C>> {
    let inv = 1.0 / n_phi as f64;
    let twiddle: Vec<C> = (0..n_phi).map(|j| C::from_polar(1.0, -TAU * j as f64 / n_phi as f64)).collect();
    ring_cos
        .iter()
        .map(|&z| {
            let s = (1.0 - z * z).max(0.0).sqrt();
            let f: Vec<C> = (0..n_phi)
                .map(|j| {
                    let phi = TAU * j as f64 / n_phi as f64;
                    e(r * (s * phi.cos() * v.x + s * phi.sin() * v.y + z * v.z))
                })
                .collect();
            (0..=2 * pmax)
                .map(|k| {
                    let p = k as i64 - pmax as i64;
                    let mut acc = C::new(0.0, 0.0);
                    for (j, fj) in f.iter().enumerate() {
                        acc += twiddle[(p.rem_euclid(n_phi as i64) as usize * j) % n_phi] * fj;
                    }
                    acc * inv
                })
                .collect()
        })
        .collect()
}

/// `E[a, c] = Σ_rings w · P_a · P_c · F(m_a − m_c)` where `P` holds the
/// real polar profile of each basis function on each ring.
pub fn ring_product(profiles: &[Vec<f64>], ms: &[i64], ring_w: &[f64], phases: &[Vec<C>], pmax: usize) -> DMatrix<C> {
    let dim = ms.len();
    let mut out = DMatrix::<C>::zeros(dim, dim);
    for ((prof, w), f) in profiles.iter().zip(ring_w).zip(phases) {
        for c in 0..dim {
            let pc = w * prof[c];
            if pc == 0.0 {
                continue;
            }
            let mut col = out.column_mut(c);
            for a in 0..dim {
                let k = (ms[a] - ms[c] + pmax as i64) as usize;
                col[a] += f[k] * (prof[a] * pc);
            }
        }
    }
    out
}

/// Right-multiplies by a block-diagonal matrix: `groups` lists
/// `(l, first column)` for each run of `2l+1` consecutive columns carrying
/// orders `m = −l..=l`, and `blocks[l]` is the block for degree `l`. Columns
/// outside every group are left untouched.
pub fn right_multiply_blocks(e: &DMatrix<C>, groups: &[(usize, usize)], blocks: &[DMatrix<C>]) -> DMatrix<C> {
    let mut out = e.clone();
    for &(l, start) in groups {
        let w = 2 * l + 1;
        let src = e.columns(start, w);
        out.columns_mut(start, w).copy_from(&(src * &blocks[l]));
    }
    out
}

/// `Σ_i f(i)` over `0..n`, evaluated in parallel chunks but summed strictly
/// in index order so the result does not depend on scheduling.
pub fn ordered_sum<F>(n: usize, rows: usize, cols: usize, f: F) -> DMatrix<C>
where
    F: Fn(usize) -> DMatrix<C> + Sync,
{
    let mut acc = DMatrix::<C>::zeros(rows, cols);
    let chunk = (2 * rayon::current_num_threads()).max(1);
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let parts: Vec<DMatrix<C>> = (start..end).into_par_iter().map(&f).collect();
        for p in parts {
            acc += p;
        }
        start = end;
    }
    acc
}
