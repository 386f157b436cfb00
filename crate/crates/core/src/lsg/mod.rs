//! Local spectral gap estimates for the isometric action on ℝ³.
//!
//! For a bounded region `B` and finite generating set `F`, the smallest
//! value of `Σ_{g∈F} ‖g·φ − φ‖²_{2,B} / ‖φ‖²_{2,B}` over functions `φ` with
//! `∫_B φ = 0` in a finite test space bounds the best constant `κ` in
//! `‖φ‖_{2,B} ≤ κ max_g ‖g·φ − φ‖_{2,B}` from below: no test function
//! violates the inequality with `κ = (|F|/λ_min)^{1/2}`. Here
//! `g·φ = φ∘g⁻¹`.
//!
//! The test space is spanned by `b_k(y) = exp(2πi⟨k, (y − lo) ⊘ P⟩)` for
//! `k ∈ {−N, …, N}³` on an enclosing box `[lo, lo + P]`. Each `b_k∘g⁻¹` is
//! again a plane wave, so every matrix entry is a closed-form integral of a
//! plane wave over `B`.

mod region;

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Isometry;

pub use region::{Domain, Region, RegionQuadrature};

type C = Complex64;

/// Largest admissible condition number of the mass matrix.
pub const MASS_COND_MAX: f64 = 1e12;

/// `λ_min` at or below this counts as no gap.
pub const NO_GAP_LAMBDA: f64 = 1e-10;

/// Tensor trigonometric basis on a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigBasis {
    pub n: usize,
    pub domain: Domain,
}

impl TrigBasis {
    pub fn dim(&self) -> usize {
        (2 * self.n + 1).pow(3)
    }

    /// Integer frequency of basis function `i`; the last axis varies fastest.
    pub fn index(&self, i: usize) -> [i64; 3] {
        let w = 2 * self.n + 1;
        let n = self.n as i64;
        [(i / (w * w)) as i64 - n, (i / w % w) as i64 - n, (i % w) as i64 - n]
    }

    /// `ξ_i` with `b_i(y) = exp(2πi⟨ξ_i, y − lo⟩)`.
    pub fn frequency(&self, i: usize) -> Vector3<f64> {
        let k = self.index(i);
        let len = self.domain.lengths();
        Vector3::new(k[0] as f64 / len.x, k[1] as f64 / len.y, k[2] as f64 / len.z)
    }

    /// Largest `|ξ_i|`.
    pub fn max_frequency(&self) -> f64 {
        let len = self.domain.lengths();
        let n = self.n as f64;
        Vector3::new(n / len.x, n / len.y, n / len.z).norm()
    }

    /// `Σ_i c_i b_i(y)`, factored per axis.
    pub fn evaluate(&self, coeffs: &[C], y: &Vector3<f64>) -> C {
        let w = 2 * self.n + 1;
        let len = self.domain.lengths();
        let powers: Vec<Vec<C>> = (0..3)
            .map(|a| {
                let base = C::from_polar(1.0, TAU * (y[a] - self.domain.lo[a]) / len[a]);
                let inv = base.conj();
                let mut p = vec![C::new(0.0, 0.0); w];
                p[self.n] = C::new(1.0, 0.0);
                for k in 1..=self.n {
                    p[self.n + k] = p[self.n + k - 1] * base;
                    p[self.n - k] = p[self.n - k + 1] * inv;
                }
                p
            })
            .collect();
        let mut total = C::new(0.0, 0.0);
        for i in 0..w {
            let mut s1 = C::new(0.0, 0.0);
            for j in 0..w {
                let row = &coeffs[(i * w + j) * w..(i * w + j + 1) * w];
                let s2: C = row.iter().zip(&powers[2]).map(|(c, p)| c * p).sum();
                s1 += s2 * powers[1][j];
            }
            total += s1 * powers[0][i];
        }
        total
    }
}

/// An assembled minimization problem: `a` is the Dirichlet form, `m` the
/// Gram matrix on `B` and `mean[i] = ∫_B b_i`.
#[derive(Debug, Clone)]
pub struct LsgProblem {
    pub generators: Vec<Isometry>,
    pub region: Region,
    pub basis: TrigBasis,
    pub a: DMatrix<C>,
    pub m: DMatrix<C>,
    pub mean: DVector<C>,
}

/// Builds the problem on the smallest box enclosing `B` and each `g⁻¹B`.
pub fn assemble_problem(generators: &[Isometry], region: &Region, n: usize) -> Result<LsgProblem> {
    let domain = Domain::enclosing(region, generators)?;
    assemble_problem_in(generators, region, domain, n)
}

/// Builds the problem on a given box, which must contain `B` and each `g⁻¹B`.
pub fn assemble_problem_in(generators: &[Isometry], region: &Region, domain: Domain, n: usize) -> Result<LsgProblem> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("generator set is empty".into()));
    }
    domain.check_contains(region, generators)?;
    let basis = TrigBasis { n, domain };
    let dim = basis.dim();
    let lo = Vector3::from(domain.lo);
    let freqs: Vec<Vector3<f64>> = (0..dim).map(|i| basis.frequency(i)).collect();
    // b_i∘g⁻¹ = p_i · exp(2πi⟨θξ_i, ·⟩) with p_i = exp(−2πi⟨ξ_i, θᵀv + lo⟩)
    let moved: Vec<(Vec<Vector3<f64>>, Vec<C>)> = generators
        .iter()
        .map(|g| {
            let th = g.rotation();
            let shift = th.transpose() * g.translation() + lo;
            let f = freqs.iter().map(|xi| th * xi).collect();
            let p = freqs.iter().map(|xi| C::from_polar(1.0, -TAU * xi.dot(&shift))).collect();
            (f, p)
        })
        .collect();
    let p0: Vec<C> = freqs.iter().map(|xi| C::from_polar(1.0, -TAU * xi.dot(&lo))).collect();
    let integral = |xi: Vector3<f64>| region.plane_wave_integral(&xi);

    let rows: Vec<(Vec<C>, Vec<C>)> = (0..dim)
        .into_par_iter()
        .map(|i| {
            let mut mrow = vec![C::new(0.0, 0.0); dim];
            let mut arow = vec![C::new(0.0, 0.0); dim];
            for j in i..dim {
                let mij = p0[i].conj() * p0[j] * integral(freqs[j] - freqs[i]);
                let mut aij = C::new(0.0, 0.0);
                for (f, p) in &moved {
                    aij += p[i].conj() * p[j] * integral(f[j] - f[i]);
                    aij -= p[i].conj() * p0[j] * integral(freqs[j] - f[i]);
                    aij -= p0[i].conj() * p[j] * integral(f[j] - freqs[i]);
                    aij += mij;
                }
                mrow[j] = mij;
                arow[j] = aij;
            }
            (mrow, arow)
        })
        .collect();
    let mut m = DMatrix::<C>::zeros(dim, dim);
    let mut a = DMatrix::<C>::zeros(dim, dim);
    for (i, (mrow, arow)) in rows.into_iter().enumerate() {
        m[(i, i)] = C::new(mrow[i].re, 0.0);
        a[(i, i)] = C::new(arow[i].re, 0.0);
        for j in i + 1..dim {
            m[(i, j)] = mrow[j];
            m[(j, i)] = mrow[j].conj();
            a[(i, j)] = arow[j];
            a[(j, i)] = arow[j].conj();
        }
    }
    let mean = DVector::from_fn(dim, |i, _| p0[i] * integral(freqs[i]));
    Ok(LsgProblem { generators: generators.to_vec(), region: *region, basis, a, m, mean })
}

/// How ill-conditioned mass matrices are handled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaOptions {
    /// `None` rejects mass matrices with condition number above
    /// [`MASS_COND_MAX`]. `Some(τ)` instead drops directions of the
    /// constrained mass matrix with eigenvalue below `τ` times the largest,
    /// i.e. coefficient vectors whose functions nearly vanish on `B`.
    pub rank_cutoff: Option<f64>,
}

impl Default for KappaOptions {
    fn default() -> Self {
        Self { rank_cutoff: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LsgEstimate {
    pub lambda_min: f64,
    /// `(|F|/λ_min)^{1/2}`; absent when `λ_min ≤ 1e−10`.
    pub kappa_bound: Option<f64>,
    pub no_gap: bool,
    /// Coefficients of the minimizer as `(re, im)` pairs.
    pub witness: Vec<[f64; 2]>,
    pub mass_condition: f64,
    /// Dimension of the mean-zero subspace actually searched.
    pub retained_dim: usize,
    pub basis_dim: usize,
}

impl LsgEstimate {
    pub fn witness_coefficients(&self) -> Vec<C> {
        self.witness.iter().map(|[re, im]| C::new(*re, *im)).collect()
    }
}

fn eigen_condition(m: &DMatrix<C>) -> f64 {
    let ev = m.clone().symmetric_eigenvalues();
    let max = ev.max();
    let min = ev.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Orthonormal basis of `{c : Σ_i mean_i c_i = 0}` from a Householder
/// reflection.
fn mean_zero_basis(mean: &DVector<C>) -> DMatrix<C> {
    let n = mean.len();
    let mut w = mean.map(|z| z.conj());
    let norm = w.norm();
    w /= C::new(norm, 0.0);
    let phase = if w[0].norm() > 0.0 { w[0] / w[0].norm() } else { C::new(1.0, 0.0) };
    let mut v = w.clone();
    v[0] += phase;
    let vv = v.norm_squared();
    let mut z = DMatrix::<C>::zeros(n, n - 1);
    for j in 1..n {
        let s = v[j].conj() * (2.0 / vv);
        for i in 0..n {
            z[(i, j - 1)] = -v[i] * s;
        }
        z[(j, j - 1)] += C::new(1.0, 0.0);
    }
    z
}

/// Minimizes the Rayleigh quotient of `a` against `m` over mean-zero
/// coefficient vectors.
pub fn estimate_kappa(problem: &LsgProblem, opts: &KappaOptions) -> Result<LsgEstimate> {
    let dim = problem.basis.dim();
    let mass_condition = eigen_condition(&problem.m);
    if opts.rank_cutoff.is_none() && !(mass_condition <= MASS_COND_MAX) {
        return Err(Error::MassMatrixSingular(mass_condition));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument("basis has no mean-zero functions".into()));
    }
    let z = mean_zero_basis(&problem.mean);
    let zh = z.adjoint();
    let mz = &zh * &problem.m * &z;
    let az = &zh * &problem.a * &z;
    let eig = ((&mz + mz.adjoint()) * C::new(0.5, 0.0)).symmetric_eigen();
    let top = eig.eigenvalues.max();
    let floor = match opts.rank_cutoff {
        Some(tau) => tau * top,
        None => 0.0,
    };
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > floor).collect();
    if keep.is_empty() {
        return Err(Error::MassMatrixSingular(mass_condition));
    }
    let w = DMatrix::<C>::from_fn(dim - 1, keep.len(), |i, k| {
        eig.eigenvectors[(i, keep[k])] / eig.eigenvalues[keep[k]].sqrt()
    });
    let h = w.adjoint() * &az * &w;
    let red = ((&h + h.adjoint()) * C::new(0.5, 0.0)).symmetric_eigen();
    let kmin = red.eigenvalues.imin();
    let lambda_min = red.eigenvalues[kmin];
    let c = &z * (&w * red.eigenvectors.column(kmin));
    let n_gen = problem.generators.len() as f64;
    let no_gap = lambda_min <= NO_GAP_LAMBDA;
    Ok(LsgEstimate {
        lambda_min,
        kappa_bound: (!no_gap).then(|| (n_gen / lambda_min).sqrt()),
        no_gap,
        witness: c.iter().map(|z| [z.re, z.im]).collect(),
        mass_condition,
        retained_dim: keep.len(),
        basis_dim: dim,
    })
}

/// `λ_min` for each frequency cap on one fixed box, so the test spaces are
/// nested.
pub fn lambda_trend(
    generators: &[Isometry],
    region: &Region,
    domain: Domain,
    caps: &[usize],
    opts: &KappaOptions,
) -> Result<Vec<(usize, LsgEstimate)>> {
    caps.iter()
        .map(|&n| Ok((n, estimate_kappa(&assemble_problem_in(generators, region, domain, n)?, opts)?)))
        .collect()
}

/// `cᴴAc / cᴴMc` from the assembled matrices.
pub fn rayleigh_quotient(problem: &LsgProblem, coeffs: &[C]) -> f64 {
    let c = DVector::from_column_slice(coeffs);
    c.dotc(&(&problem.a * &c)).re / c.dotc(&(&problem.m * &c)).re
}

/// Witness quantities recomputed by quadrature on `B`, independent of the
/// closed-form assembly.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessCheck {
    pub norm_sq: f64,
    pub energy: f64,
    pub mean: f64,
    /// `|Σ_i mean_i c_i|` from the assembled moments.
    pub mean_assembled: f64,
    pub lambda_min: f64,
    pub norm_residual: f64,
    pub energy_residual: f64,
    pub nodes: usize,
    pub passed: bool,
}

/// Recomputes `‖φ‖²_{2,B}`, `Σ_g ‖φ∘g⁻¹ − φ‖²_{2,B}` and `|∫_B φ|`.
pub fn recompute_witness(problem: &LsgProblem, estimate: &LsgEstimate) -> WitnessCheck {
    let c = estimate.witness_coefficients();
    let q = problem.region.quadrature(problem.basis.max_frequency());
    let inverses: Vec<Isometry> = problem.generators.iter().map(|g| g.inverse()).collect();
    let (norm_sq, energy, mean) = q
        .nodes
        .par_iter()
        .zip(&q.weights)
        .map(|(y, w)| {
            let phi = problem.basis.evaluate(&c, y);
            let e: f64 = inverses.iter().map(|gi| (problem.basis.evaluate(&c, &gi.apply(y)) - phi).norm_sqr()).sum();
            (w * phi.norm_sqr(), w * e, phi * *w)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0, C::new(0.0, 0.0)), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let mean_assembled = problem.mean.iter().zip(&c).map(|(m, c)| m * c).sum::<C>().norm();
    let norm_residual = (norm_sq - 1.0).abs();
    let energy_residual = (energy - estimate.lambda_min).abs();
    WitnessCheck {
        norm_sq,
        energy,
        mean: mean.norm(),
        mean_assembled,
        lambda_min: estimate.lambda_min,
        norm_residual,
        energy_residual,
        nodes: q.nodes.len(),
        passed: norm_residual <= 1e-8 && energy_residual <= 1e-8 && mean_assembled <= 1e-10,
    }
}

/// CSV of `φ` on an `n³` grid spanning the region's bounding box.
pub fn witness_csv(problem: &LsgProblem, estimate: &LsgEstimate, n: usize) -> String {
    let c = estimate.witness_coefficients();
    let center = problem.region.center();
    let half = match problem.region {
        Region::Ball { radius, .. } => Vector3::repeat(radius),
        Region::Box { half_widths, .. } => Vector3::from(half_widths),
    };
    let mut out = String::from("x,y,z,re,im\n");
    let step = |k: usize| if n > 1 { -1.0 + 2.0 * k as f64 / (n - 1) as f64 } else { 0.0 };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let y = center + Vector3::new(step(i) * half.x, step(j) * half.y, step(k) * half.z);
                let v = problem.basis.evaluate(&c, &y);
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    crate::io::fmt_f64(y.x),
                    crate::io::fmt_f64(y.y),
                    crate::io::fmt_f64(y.z),
                    crate::io::fmt_f64(v.re),
                    crate::io::fmt_f64(v.im)
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_rotation, random_vector, SeedStream};
    use crate::shipped;

    fn seeded_generators(seed: u64, count: usize) -> Vec<Isometry> {
        let mut rng = SeedStream::new(seed).rng(0);
        (0..count)
            .map(|_| Isometry::new(random_rotation(&mut rng), random_vector(&mut rng, 0.3)).unwrap())
            .collect()
    }

    fn hermitian_residual(m: &DMatrix<C>) -> f64 {
        (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn basis_indexing_and_evaluation() {
        let basis = TrigBasis { n: 2, domain: Domain::new([-1.0, -2.0, 0.0], [1.0, 1.0, 0.5]).unwrap() };
        assert_eq!(basis.dim(), 125);
        assert_eq!(basis.index(0), [-2, -2, -2]);
        assert_eq!(basis.index(62), [0, 0, 0]);
        let y = Vector3::new(0.3, -0.7, 0.2);
        let lo = Vector3::from(basis.domain.lo);
        for i in [0, 7, 62, 124] {
            let mut c = vec![C::new(0.0, 0.0); basis.dim()];
            c[i] = C::new(1.0, 0.0);
            let direct = C::from_polar(1.0, TAU * basis.frequency(i).dot(&(y - lo)));
            assert!((basis.evaluate(&c, &y) - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_generator_gives_zero_form() {
        let p = assemble_problem(&[Isometry::identity()], &Region::unit_ball(), 2).unwrap();
        assert!(p.a.iter().all(|z| z.norm() < 1e-12));
        let est = estimate_kappa(&p, &KappaOptions { rank_cutoff: Some(1e-10) }).unwrap();
        assert!(est.no_gap && est.kappa_bound.is_none());
        assert!(est.lambda_min.abs() < 1e-10);
    }

    #[test]
    fn constant_function_row_vanishes() {
        let region = Region::unit_ball();
        let p = assemble_problem(&seeded_generators(1, 2), &region, 2).unwrap();
        let c0 = p.basis.dim() / 2;
        assert_eq!(p.basis.index(c0), [0, 0, 0]);
        assert!(p.a.row(c0).iter().all(|z| z.norm() < 1e-12));
        assert!((p.mean[c0].re - region.volume()).abs() < 1e-12);
    }

    #[test]
    fn forms_are_hermitian_and_semidefinite() {
        let p = assemble_problem(&seeded_generators(2, 2), &Region::unit_ball(), 4).unwrap();
        assert_eq!(p.a.nrows(), 729);
        assert!(hermitian_residual(&p.a) == 0.0 && hermitian_residual(&p.m) == 0.0);
        let scale = p.m[(0, 0)].re;
        assert!(p.a.clone().symmetric_eigenvalues().min() >= -1e-10 * scale.max(1.0));
        assert!(p.m.clone().symmetric_eigenvalues().min() >= -1e-10 * scale.max(1.0));
    }

    #[test]
    fn matrices_match_quadrature() {
        let region = Region::Box { center: [0.1, 0.0, -0.2], half_widths: [0.8, 0.6, 0.7] };
        let gens = seeded_generators(3, 2);
        let p = assemble_problem(&gens, &region, 2).unwrap();
        let q = region.quadrature(p.basis.max_frequency());
        let mut rng = SeedStream::new(9).rng(1);
        for _ in 0..3 {
            let c: Vec<C> = (0..p.basis.dim()).map(|_| C::new(crate::rng::gaussian(&mut rng), 0.0)).collect();
            let cv = DVector::from_column_slice(&c);
            let mass: f64 = q.nodes.iter().zip(&q.weights).map(|(y, w)| w * p.basis.evaluate(&c, y).norm_sqr()).sum();
            let energy: f64 = q
                .nodes
                .iter()
                .zip(&q.weights)
                .map(|(y, w)| {
                    let phi = p.basis.evaluate(&c, y);
                    gens.iter().map(|g| w * (p.basis.evaluate(&c, &g.inverse().apply(y)) - phi).norm_sqr()).sum::<f64>()
                })
                .sum();
            let m_form = cv.dotc(&(&p.m * &cv)).re;
            let a_form = cv.dotc(&(&p.a * &cv)).re;
            assert!((mass - m_form).abs() < 1e-9 * m_form, "{mass} vs {m_form}");
            assert!((energy - a_form).abs() < 1e-9 * a_form, "{energy} vs {a_form}");
        }
    }

    #[test]
    fn strict_mode_rejects_overresolved_basis() {
        let wide = Domain::new([-2.0; 3], [2.0; 3]).unwrap();
        let p = assemble_problem_in(&shipped::lsg_generators(), &Region::unit_ball(), wide, 3).unwrap();
        assert!(matches!(estimate_kappa(&p, &KappaOptions::default()), Err(Error::MassMatrixSingular(_))));
        let pruned = estimate_kappa(&p, &KappaOptions { rank_cutoff: Some(1e-10) }).unwrap();
        assert!(pruned.retained_dim < p.basis.dim() - 1 && pruned.lambda_min > 0.0);
    }

    #[test]
    fn witness_is_normalized_mean_zero_and_scale_free() {
        let p = assemble_problem(&shipped::lsg_generators(), &Region::unit_ball(), 2).unwrap();
        let est = estimate_kappa(&p, &KappaOptions::default()).unwrap();
        assert!(est.lambda_min > 0.0);
        let check = recompute_witness(&p, &est);
        assert!(check.passed, "{check:?}");
        assert!(check.mean < 1e-10);
        let c = est.witness_coefficients();
        let base = rayleigh_quotient(&p, &c);
        assert!((base - est.lambda_min).abs() < 1e-9);
        for t in [0.1, 10.0] {
            let scaled: Vec<C> = c.iter().map(|z| z * t).collect();
            assert!((rayleigh_quotient(&p, &scaled) - base).abs() < 1e-9 * base.max(1.0));
        }
    }

    #[test]
    fn adding_a_generator_cannot_lower_the_minimum() {
        let region = Region::unit_ball();
        let gens = seeded_generators(5, 3);
        let domain = Domain::enclosing(&region, &gens).unwrap();
        let opts = KappaOptions { rank_cutoff: Some(1e-10) };
        let two = estimate_kappa(&assemble_problem_in(&gens[..2], &region, domain, 2).unwrap(), &opts).unwrap();
        let three = estimate_kappa(&assemble_problem_in(&gens, &region, domain, 2).unwrap(), &opts).unwrap();
        assert!(three.lambda_min >= two.lambda_min - 1e-10, "{} < {}", three.lambda_min, two.lambda_min);
    }
}
