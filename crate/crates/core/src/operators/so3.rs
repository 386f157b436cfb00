//! `T_x` on the truncated Peter-Weyl basis of `L²(SO(3))`.
//!
//! Basis functions are `b^l_mn(ω) = √(2l+1)·conj(D^l_mn(ω))`. Left
//! translation by `θ` acts on the `m` index through `D^l(θ)` and right
//! translation by `h` acts on the `n` index through `conj(D^l(h))`.
//! Quadrature uses Euler angles `ω = R_z(α) R_y(β) R_z(γ)` with equispaced
//! `α`, `γ` and Gauss-Legendre nodes in `cos β`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::Result;
use crate::group::AtomicMeasure;
use crate::harmonics::{gauss_legendre, wigner_d_all, wigner_small_d_all, BandLimit, SphereQuadrature};

use super::assembly::{e, ordered_sum, quadrature_degree, right_multiply_blocks, ring_phase_dft, ring_product};
use super::norm::{hermitian_residual, operator_norm, NormEstimate};
use super::{BandLimitedOperator, Basis, Parameter};

type C = Complex64;

/// Flat index of `b^l_mn`.
#[inline]
pub fn pw_index(l: usize, m: i64, n: i64) -> usize {
    // Σ_{k<l} (2k+1)²
    let offset = if l == 0 { 0 } else { l * (2 * l - 1) * (2 * l + 1) / 3 };
    let w = 2 * l as i64 + 1;
    offset + ((l as i64 + m) * w + (l as i64 + n)) as usize
}

/// `(l, m, n)` for every basis index, in order.
pub fn pw_labels(band: BandLimit) -> Vec<(usize, i64, i64)> {
    let mut out = Vec::with_capacity(band.so3_dim());
    for l in 0..=band.l() {
        let li = l as i64;
        for m in -li..=li {
            for n in -li..=li {
                out.push((l, m, n));
            }
        }
    }
    out
}

fn rz(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn ry(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Multiplies every `(l, ·, n)` column group on the right by `D^l`.
fn apply_left_translation(mmat: &DMatrix<C>, d: &[DMatrix<C>]) -> DMatrix<C> {
    let mut out = DMatrix::<C>::zeros(mmat.nrows(), mmat.ncols());
    for (l, dl) in d.iter().enumerate() {
        let li = l as i64;
        for n in -li..=li {
            for m in -li..=li {
                let mut col = out.column_mut(pw_index(l, m, n));
                for k in -li..=li {
                    let c = dl[((li + k) as usize, (li + m) as usize)];
                    col.axpy(c, &mmat.column(pw_index(l, k, n)), C::new(1.0, 0.0));
                }
            }
        }
    }
    out
}

/// Full matrix of `T_x` on `{b^l_mn}_{l≤L}`.
pub fn so3_operator(mu: &AtomicMeasure, x: &Vector3<f64>, band: BandLimit, margin: usize) -> BandLimitedOperator {
    let lmax = band.l();
    let dim = band.so3_dim();
    let labels = pw_labels(band);
    let kappa = mu.moments().max_radius;
    let degree = quadrature_degree(band, margin, TAU * x.norm() * kappa);
    let n_az = degree + 1;
    let (zs, ws) = gauss_legendre(degree / 2 + 1);
    let pmax = 2 * lmax;
    let width = 2 * pmax + 1;

    // √(2l+1) d^l_mn(β) per β node
    let profiles: Vec<Vec<f64>> = zs
        .iter()
        .map(|&z| {
            let d = wigner_small_d_all(lmax, z.clamp(-1.0, 1.0).acos());
            labels
                .iter()
                .map(|&(l, m, n)| ((2 * l + 1) as f64).sqrt() * d[l][((l as i64 + m) as usize, (l as i64 + n) as usize)])
                .collect()
        })
        .collect();
    let twiddle: Vec<C> = (0..n_az).map(|j| C::from_polar(1.0, -TAU * j as f64 / n_az as f64)).collect();
    let tw = |p: i64, j: usize| twiddle[(p.rem_euclid(n_az as i64) as usize * j) % n_az];
    let az: Vec<f64> = (0..n_az).map(|j| TAU * j as f64 / n_az as f64).collect();

    let atoms = mu.atoms();
    let matrix = ordered_sum(atoms.len(), dim, dim, |i| {
        let (g, w) = &atoms[i];
        let v = g.translation();
        let mut mmat = DMatrix::<C>::zeros(dim, dim);
        for ((z, wb), prof) in zs.iter().zip(&ws).zip(&profiles) {
            let rb = ry(z.clamp(-1.0, 1.0).acos());
            // G[α_j][q] = (1/N) Σ_k e^{−iqγ_k} f(α_j, β, γ_k)
            let mut gq = vec![C::new(0.0, 0.0); n_az * width];
            for (j, &a) in az.iter().enumerate() {
                let va = rz(-a) * v;
                let f: Vec<C> = az.iter().map(|&c| e((rb * (rz(c) * x)).dot(&va))).collect();
                for qi in 0..width {
                    let q = qi as i64 - pmax as i64;
                    let mut acc = C::new(0.0, 0.0);
                    for (k, fk) in f.iter().enumerate() {
                        acc += tw(q, k) * fk;
                    }
                    gq[j * width + qi] = acc / n_az as f64;
                }
            }
            // F[p][q] = (1/N) Σ_j e^{−ipα_j} G[α_j][q]
            let mut fpq = vec![C::new(0.0, 0.0); width * width];
            for pi in 0..width {
                let p = pi as i64 - pmax as i64;
                for j in 0..n_az {
                    let t = tw(p, j) / n_az as f64;
                    for qi in 0..width {
                        fpq[pi * width + qi] += t * gq[j * width + qi];
                    }
                }
            }
            let half = 0.5 * wb;
            for (c, &(_, mc, nc)) in labels.iter().enumerate() {
                let pc = half * prof[c];
                if pc == 0.0 {
                    continue;
                }
                let mut col = mmat.column_mut(c);
                for (a, &(_, ma, na)) in labels.iter().enumerate() {
                    let k = (ma - mc + pmax as i64) as usize * width + (na - nc + pmax as i64) as usize;
                    col[a] += fpq[k] * (prof[a] * pc);
                }
            }
        }
        apply_left_translation(&mmat, &wigner_d_all(lmax, g.rotation())) * C::new(*w, 0.0)
    });
    BandLimitedOperator {
        matrix,
        basis: Basis::PeterWeyl,
        band,
        parameter: Parameter::Point([x.x, x.y, x.z]),
        margin,
        degree,
        label: mu.label().to_string(),
    }
}

/// `T_x` for `x = r·ẑ`, which commutes with right translation by rotations
/// about `ẑ` and so splits into one block per right index `n`. Block `n`
/// acts on `{b^l_mn : |n| ≤ l ≤ L}` ordered by `l`, then `m`.
#[derive(Debug, Clone)]
pub struct AxialOperator {
    /// Indexed by `n + L`.
    pub blocks: Vec<DMatrix<C>>,
    pub band: BandLimit,
    pub radius: f64,
    pub margin: usize,
    pub degree: usize,
    pub label: String,
}

impl AxialOperator {
    pub fn block(&self, n: i64) -> &DMatrix<C> {
        &self.blocks[(n + self.band.l() as i64) as usize]
    }

    /// Norm as the largest block norm; the residual is the largest block residual.
    pub fn norm(&self) -> Result<NormEstimate> {
        let mut best: Option<NormEstimate> = None;
        let mut residual = 0.0f64;
        for b in &self.blocks {
            let est = operator_norm(b)?;
            residual = residual.max(est.residual);
            if best.is_none_or(|cur| est.value > cur.value) {
                best = Some(est);
            }
        }
        let mut est = best.expect("at least one block");
        est.residual = residual;
        Ok(est)
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.blocks.iter().map(hermitian_residual).fold(0.0, f64::max)
    }

    /// The full Peter-Weyl matrix.
    pub fn to_dense(&self) -> DMatrix<C> {
        let lmax = self.band.l() as i64;
        let dim = self.band.so3_dim();
        let mut out = DMatrix::<C>::zeros(dim, dim);
        for n in -lmax..=lmax {
            let idx = axial_labels(self.band, n);
            let b = self.block(n);
            for (a, &(la, ma)) in idx.iter().enumerate() {
                for (c, &(lc, mc)) in idx.iter().enumerate() {
                    out[(pw_index(la, ma, n), pw_index(lc, mc, n))] = b[(a, c)];
                }
            }
        }
        out
    }
}

fn axial_labels(band: BandLimit, n: i64) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for l in n.unsigned_abs() as usize..=band.l() {
        for m in -(l as i64)..=l as i64 {
            out.push((l, m));
        }
    }
    out
}

/// Block-diagonal assembly of `T_{rẑ}`.
pub fn so3_axial(mu: &AtomicMeasure, r: f64, band: BandLimit, margin: usize) -> AxialOperator {
    let lmax = band.l();
    let kappa = mu.moments().max_radius;
    let degree = quadrature_degree(band, margin, TAU * r.abs() * kappa);
    let q = SphereQuadrature::with_degree(degree);
    let pmax = 2 * lmax;
    let small_d: Vec<Vec<DMatrix<f64>>> =
        q.ring_cos.iter().map(|&z| wigner_small_d_all(lmax, z.clamp(-1.0, 1.0).acos())).collect();
    let atoms = mu.atoms();
    let phases: Vec<Vec<Vec<C>>> =
        atoms.iter().map(|(g, _)| ring_phase_dft(&q.ring_cos, q.n_phi, g.translation(), r, pmax)).collect();
    let rot: Vec<Vec<DMatrix<C>>> = atoms.iter().map(|(g, _)| wigner_d_all(lmax, g.rotation())).collect();

    let blocks = (-(lmax as i64)..=lmax as i64)
        .map(|n| {
            let idx = axial_labels(band, n);
            let ms: Vec<i64> = idx.iter().map(|p| p.1).collect();
            let mut groups = Vec::new();
            let mut at = 0;
            for l in n.unsigned_abs() as usize..=lmax {
                groups.push((l, at));
                at += 2 * l + 1;
            }
            let profiles: Vec<Vec<f64>> = small_d
                .iter()
                .map(|d| {
                    idx.iter()
                        .map(|&(l, m)| ((2 * l + 1) as f64).sqrt() * d[l][((l as i64 + m) as usize, (l as i64 + n) as usize)])
                        .collect()
                })
                .collect();
            let dim = idx.len();
            ordered_sum(atoms.len(), dim, dim, |i| {
                let e = ring_product(&profiles, &ms, &q.ring_weights, &phases[i], pmax);
                right_multiply_blocks(&e, &groups, &rot[i]) * C::new(atoms[i].1, 0.0)
            })
        })
        .collect();
    AxialOperator { blocks, band, radius: r, margin, degree, label: mu.label().to_string() }
}

/// `‖T_x‖` through the axial splitting; `T_x` and `T_{|x|ẑ}` are unitarily
/// equivalent by a right translation, which preserves every truncation.
pub fn so3_norm(mu: &AtomicMeasure, x: &Vector3<f64>, band: BandLimit, margin: usize) -> Result<NormEstimate> {
    so3_axial(mu, x.norm(), band, margin).norm()
}

/// All `b^l_mn(ω)` in basis order.
pub fn pw_eval(band: BandLimit, omega: &Matrix3<f64>) -> Vec<C> {
    let d = wigner_d_all(band.l(), omega);
    let mut out = Vec::with_capacity(band.so3_dim());
    for (l, dl) in d.iter().enumerate() {
        let s = ((2 * l + 1) as f64).sqrt();
        for i in 0..=2 * l {
            for j in 0..=2 * l {
                out.push(dl[(i, j)].conj() * s);
            }
        }
    }
    out
}

/// Euler-angle product rule exact for functions on SO(3) of degree
/// `≤ degree`: nodes `R_z(α) R_y(β) R_z(γ)` and weights summing to one.
pub fn euler_quadrature(degree: usize) -> (Vec<Matrix3<f64>>, Vec<f64>) {
    let n_az = degree + 1;
    let (zs, ws) = gauss_legendre(degree / 2 + 1);
    let mut nodes = Vec::with_capacity(zs.len() * n_az * n_az);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (z, wz) in zs.iter().zip(&ws) {
        let rb = ry(z.clamp(-1.0, 1.0).acos());
        for j in 0..n_az {
            let ra = rz(TAU * j as f64 / n_az as f64) * rb;
            for k in 0..n_az {
                nodes.push(ra * rz(TAU * k as f64 / n_az as f64));
                weights.push(0.5 * wz / (n_az * n_az) as f64);
            }
        }
    }
    (nodes, weights)
}

/// Matrix of right translation `φ ↦ φ(· h)` on the Peter-Weyl basis.
pub fn sigma_matrix(h: &Matrix3<f64>, band: BandLimit) -> DMatrix<C> {
    let dim = band.so3_dim();
    let mut out = DMatrix::<C>::zeros(dim, dim);
    for (l, d) in wigner_d_all(band.l(), h).into_iter().enumerate() {
        let li = l as i64;
        for m in -li..=li {
            for k in -li..=li {
                for n in -li..=li {
                    out[(pw_index(l, m, k), pw_index(l, m, n))] = d[((li + k) as usize, (li + n) as usize)].conj();
                }
            }
        }
    }
    out
}
