//! Wigner D-matrices.
//!
//! `wigner_d(l, R)` is the matrix of `f ↦ f ∘ R⁻¹` on the degree-`l`
//! harmonics: `Y_lm(R⁻¹ξ) = Σ_m' Y_lm'(ξ) D^l_{m'm}(R)`. Row and column
//! indices run over `m = -l..=l` at offset `l + m`.
//!
//! Matrices are built from the spin-½ matrix of the rotation quaternion by
//! coupling one spinor at a time: `D^j` is a short weighted combination of
//! four entries of `D^{j-½}`, with nonnegative coefficients, which keeps the
//! recursion stable for all rotation angles (no Euler-angle singularities).

use nalgebra::{DMatrix, Matrix3, Rotation3, UnitQuaternion};
use num_complex::Complex64;

type C = Complex64;

/// Spin-½ matrix `[[U₊₊, U₊₋], [U₋₊, U₋₋]]` of a rotation matrix.
fn spinor(r: &Matrix3<f64>) -> [[C; 2]; 2] {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
    spinor_from_quaternion(q.w, q.i, q.j, q.k)
}

/// `U = w·1 − i(xσx + yσy + zσz)`.
fn spinor_from_quaternion(w: f64, x: f64, y: f64, z: f64) -> [[C; 2]; 2] {
    [
        [C::new(w, -z), C::new(-y, -x)],
        [C::new(y, -x), C::new(w, z)],
    ]
}

/// Half-integer ladder: returns `D^{n/2}` for `n = 0..=2*lmax`, each stored
/// row-major as `(n+1)²` entries with index `j + m`.
fn ladder(lmax: usize, u: [[C; 2]; 2]) -> Vec<Vec<C>> {
    let upp = u[0][0];
    let upm = u[0][1];
    let ump = u[1][0];
    let umm = u[1][1];
    let mut out: Vec<Vec<C>> = Vec::with_capacity(2 * lmax + 1);
    out.push(vec![C::new(1.0, 0.0)]);
    let sq: Vec<f64> = (0..=2 * lmax + 1).map(|k| (k as f64).sqrt()).collect();
    for n in 1..=2 * lmax {
        let prev = &out[n - 1];
        let pw = n; // width of prev
        let get = |r: isize, c: isize| -> C {
            if r < 0 || c < 0 || r as usize >= pw || c as usize >= pw {
                C::new(0.0, 0.0)
            } else {
                prev[r as usize * pw + c as usize]
            }
        };
        let inv = 1.0 / n as f64;
        let mut cur = vec![C::new(0.0, 0.0); (n + 1) * (n + 1)];
        for row in 0..=n {
            let (ri, rn) = (sq[row], sq[n - row]);
            let r = row as isize;
            for col in 0..=n {
                let (ci, cn) = (sq[col], sq[n - col]);
                let c = col as isize;
                let mut acc = C::new(0.0, 0.0);
                if col > 0 {
                    acc += (get(r - 1, c - 1) * upp * ri + get(r, c - 1) * ump * rn) * ci;
                }
                if col < n {
                    acc += (get(r - 1, c) * upm * ri + get(r, c) * umm * rn) * cn;
                }
                cur[row * (n + 1) + col] = acc * inv;
            }
        }
        out.push(cur);
    }
    out
}

fn to_matrices(lmax: usize, ladder: Vec<Vec<C>>) -> Vec<DMatrix<C>> {
    (0..=lmax)
        .map(|l| {
            let d = 2 * l + 1;
            DMatrix::from_row_slice(d, d, &ladder[2 * l])
        })
        .collect()
}

/// `D^l(R)` for every `l ≤ lmax`.
pub fn wigner_d_all(lmax: usize, rotation: &Matrix3<f64>) -> Vec<DMatrix<C>> {
    to_matrices(lmax, ladder(lmax, spinor(rotation)))
}

/// `D^l(R)`.
pub fn wigner_d(l: usize, rotation: &Matrix3<f64>) -> DMatrix<C> {
    wigner_d_all(l, rotation).pop().expect("non-empty")
}

/// Real small-d matrices `d^l(β) = D^l(R_y(β))` for `l ≤ lmax`.
pub fn wigner_small_d_all(lmax: usize, beta: f64) -> Vec<DMatrix<f64>> {
    let (s, c) = (0.5 * beta).sin_cos();
    to_matrices(lmax, ladder(lmax, spinor_from_quaternion(c, 0.0, s, 0.0)))
        .into_iter()
        .map(|m| m.map(|z| z.re))
        .collect()
}

/// Rotation angle in `[0, π]` of a rotation matrix.
pub fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r)).angle()
}

/// Character `χ_l(φ) = Σ_{m=-l}^{l} e^{imφ}` of the degree-`l` representation.
pub fn character(l: usize, angle: f64) -> f64 {
    (-(l as i64)..=l as i64).map(|m| (m as f64 * angle).cos()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::sphere::{sh_all, sh_index, SphereQuadrature};
    use crate::rng::{random_rotation, random_unit_vector, SeedStream};

    fn rz(phi: f64) -> Matrix3<f64> {
        let (s, c) = phi.sin_cos();
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    }

    fn unitarity_defect(d: &DMatrix<C>) -> f64 {
        let n = d.nrows();
        (d.adjoint() * d - DMatrix::<C>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn trivial_block() {
        let r = random_rotation(&mut SeedStream::new(1).rng(0));
        let d = wigner_d(0, &r);
        assert_eq!(d.shape(), (1, 1));
        assert!((d[(0, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn z_rotations_are_diagonal() {
        let phi = 0.83;
        for l in 0..6 {
            let d = wigner_d(l, &rz(phi));
            for i in 0..=2 * l {
                for j in 0..=2 * l {
                    let m = i as f64 - l as f64;
                    let expect = if i == j { C::from_polar(1.0, -m * phi) } else { C::new(0.0, 0.0) };
                    assert!((d[(i, j)] - expect).norm() < 1e-14, "l={l} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn matches_projection_onto_harmonics() {
        // Independent route: ⟨Y_lm', Y_lm ∘ R⁻¹⟩ by exact quadrature.
        let mut rng = SeedStream::new(2).rng(0);
        let lmax = 5;
        let q = SphereQuadrature::with_degree(2 * lmax);
        for _ in 0..3 {
            let r = random_rotation(&mut rng);
            let rinv = r.transpose();
            let ds = wigner_d_all(lmax, &r);
            let base: Vec<Vec<C>> = q.nodes.iter().map(|x| sh_all(lmax, x)).collect();
            let moved: Vec<Vec<C>> = q.nodes.iter().map(|x| sh_all(lmax, &(rinv * x))).collect();
            for l in 0..=lmax {
                for mp in -(l as i64)..=l as i64 {
                    for m in -(l as i64)..=l as i64 {
                        let s: C = (0..q.len())
                            .map(|k| base[k][sh_index(l, mp)].conj() * moved[k][sh_index(l, m)] * q.weights[k])
                            .sum();
                        let d = ds[l][((l as i64 + mp) as usize, (l as i64 + m) as usize)];
                        assert!((s - d).norm() < 1e-12, "l={l} m'={mp} m={m}: {s} vs {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn unitary_and_multiplicative() {
        let mut rng = SeedStream::new(3).rng(0);
        for _ in 0..100 {
            let g = random_rotation(&mut rng);
            let h = random_rotation(&mut rng);
            let dg = wigner_d_all(8, &g);
            let dh = wigner_d_all(8, &h);
            let dgh = wigner_d_all(8, &(g * h));
            for l in 0..=8 {
                assert!(unitarity_defect(&dg[l]) < 1e-11);
                let diff = (&dg[l] * &dh[l] - &dgh[l]).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(diff < 1e-10, "l={l}: {diff}");
            }
        }
    }

    #[test]
    fn trace_is_the_character() {
        let r = random_rotation(&mut SeedStream::new(4).rng(0));
        let d = wigner_d(3, &r);
        assert!(unitarity_defect(&d) < 1e-11);
        let chi = character(3, rotation_angle(&r));
        assert!((d.trace() - C::new(chi, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn small_d_is_real_y_rotation() {
        let beta: f64 = 1.1;
        let (s, c) = beta.sin_cos();
        let ry = Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c);
        let full = wigner_d_all(4, &ry);
        let small = wigner_small_d_all(4, beta);
        for l in 0..=4 {
            let diff = (full[l].map(|z| z.re) - &small[l]).amax();
            assert!(diff < 1e-14);
            assert!(full[l].iter().all(|z| z.im.abs() < 1e-14));
        }
        // d^1_{00}(β) = cos β
        assert!((small[1][(1, 1)] - c).abs() < 1e-15);
    }

    #[test]
    fn identity_and_near_identity() {
        let e = Matrix3::identity();
        for l in 0..5 {
            let d = wigner_d(l, &e);
            assert!((d - DMatrix::<C>::identity(2 * l + 1, 2 * l + 1)).iter().all(|z| z.norm() < 1e-15));
        }
        // angle π about a generic axis: quaternion w = 0
        let axis = random_unit_vector(&mut SeedStream::new(5).rng(0));
        let r = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), std::f64::consts::PI)
            .to_rotation_matrix()
            .into_inner();
        let d = wigner_d(4, &r);
        assert!(unitarity_defect(&d) < 1e-12);
        assert!((&d * &d - DMatrix::<C>::identity(9, 9)).iter().all(|z| z.norm() < 1e-12));
    }
}
