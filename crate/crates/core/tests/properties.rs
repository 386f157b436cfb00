//! Property tests for the structural invariants of every module.

use isogap_core::group::{center, convolve, symmetrize};
use isogap_core::harmonics::{bessel_j_all, sh_all, sphere_quadrature, wigner_d};
use isogap_core::lsg::{assemble_problem_in, estimate_kappa, rayleigh_quotient, Domain, KappaOptions, Region};
use isogap_core::operators::dump::{read_dump, write_dump};
use isogap_core::operators::{
    operator_norm, pw_index, pw_labels, rotation_blocks, rotation_gap, so3_operator, sphere_operator, DEFAULT_MARGIN,
};
use isogap_core::rng::{random_rotation, random_vector, SeedStream};
use isogap_core::verifier::{dirichlet_check, fit_c0, random_coefficients};
use isogap_core::{AtomicMeasure, BandLimit, Isometry};
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

fn isometry(seed: u64, id: u64, scale: f64) -> Isometry {
    let mut rng = SeedStream::new(seed).rng(id);
    Isometry::new(random_rotation(&mut rng), random_vector(&mut rng, scale)).unwrap()
}

fn pure_rotation_measure(seed: u64, n: usize) -> AtomicMeasure {
    let gs: Vec<_> = (0..n).map(|k| Isometry::rotation_only(*isometry(seed, k as u64, 0.0).rotation()).unwrap()).collect();
    AtomicMeasure::uniform(&gs, "rot").unwrap()
}

fn symmetric_measure(seed: u64, n: usize, scale: f64) -> AtomicMeasure {
    let gs: Vec<_> = (0..n).map(|k| isometry(seed, k as u64, scale)).collect();
    symmetrize(&AtomicMeasure::uniform(&gs, "sym").unwrap())
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let (g, h, k) = (isometry(seed, 0, 2.0), isometry(seed, 1, 2.0), isometry(seed, 2, 2.0));
        prop_assert!(g.compose(&h).compose(&k).approx_eq(&g.compose(&h.compose(&k)), 1e-12));
        prop_assert!(g.compose(&g.inverse()).approx_eq(&Isometry::identity(), 1e-12));
    }

    #[test]
    fn symmetrized_measures_equal_their_reverse(seed in any::<u64>(), n in 1usize..5) {
        let gs: Vec<_> = (0..n).map(|k| isometry(seed, k as u64, 1.0)).collect();
        let out = symmetrize(&AtomicMeasure::uniform(&gs, "m").unwrap());
        prop_assert!(out.approx_eq(&out.reverse(), 0.0));
    }

    #[test]
    fn wigner_is_unitary_and_multiplicative(seed in any::<u64>(), l in 0usize..=8) {
        let mut rng = SeedStream::new(seed).rng(0);
        let (a, b) = (random_rotation(&mut rng), random_rotation(&mut rng));
        let (da, db) = (wigner_d(l, &a), wigner_d(l, &b));
        let n = 2 * l + 1;
        prop_assert!(max_diff(&(da.adjoint() * &da), &DMatrix::identity(n, n)) < 1e-12);
        prop_assert!(max_diff(&wigner_d(l, &(a * b)), &(&da * &db)) < 1e-12);
    }

    #[test]
    fn bessel_values_are_bounded(t in 0.0f64..500.0) {
        for (l, j) in bessel_j_all(16, t).into_iter().enumerate() {
            prop_assert!(j.abs() <= 1.0, "j_{}({}) = {}", l, t, j);
        }
    }

    #[test]
    fn pw_index_enumerates_labels(l in 0usize..=10) {
        let band = BandLimit::new(l);
        for (i, (l, m, n)) in pw_labels(band).into_iter().enumerate() {
            prop_assert_eq!(pw_index(l, m, n), i);
        }
    }

    #[test]
    fn synthetic_profiles_invert(c in 1e-4f64..0.9) {
        let radii: Vec<f64> = (0..=20).map(|i| i as f64 / 10.0).collect();
        let norms: Vec<f64> = radii.iter().map(|r| 1.0 - c * (r * r).min(1.0)).collect();
        prop_assert!((fit_c0(&radii, &norms).c0 - c).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn centering_kills_the_mean(seed in any::<u64>(), n in 2usize..5) {
        let mu = symmetric_measure(seed, n, 1.5);
        let (c, a) = center(&mu).unwrap();
        prop_assert!(c.moments().mean_translation.norm() <= 1e-10);
        // C-moment recomputed from the original atoms
        let expect: f64 = mu
            .atoms()
            .iter()
            .map(|(g, w)| w * (g.translation() - (nalgebra::Matrix3::identity() - g.rotation()) * a).norm_squared())
            .sum();
        prop_assert!((c.moments().c - expect).abs() <= 1e-10);
    }

    #[test]
    fn convolution_multiplies_rotation_blocks(seed in any::<u64>(), n in 1usize..4, l in 0usize..=8) {
        let mu = pure_rotation_measure(seed, n);
        let nu = pure_rotation_measure(seed.wrapping_add(1), n);
        let band = BandLimit::new(l);
        let lhs = rotation_blocks(&convolve(&mu, &nu).unwrap(), band);
        let rhs = rotation_blocks(&mu, band).mul(&rotation_blocks(&nu, band));
        prop_assert!(lhs.max_diff(&rhs) < 1e-10);
    }

    #[test]
    fn sphere_rule_is_orthonormal(l in 0usize..=10) {
        let q = sphere_quadrature(BandLimit::new(l), 0);
        let vals: Vec<Vec<Complex64>> = q.nodes.iter().map(|x| sh_all(l, x)).collect();
        let n = (l + 1) * (l + 1);
        for a in 0..n {
            for b in 0..n {
                let s: Complex64 = vals.iter().zip(&q.weights).map(|(v, w)| v[a].conj() * v[b] * *w).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                prop_assert!((s - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_gap_is_nonincreasing_in_band(seed in any::<u64>()) {
        let mu = symmetric_measure(seed, 2, 0.0);
        let gaps: Vec<f64> = (1..=8).map(|l| rotation_gap(&mu, BandLimit::new(l)).alpha).collect();
        prop_assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn semigroup_at_the_origin(seed in any::<u64>(), l in 0usize..=4) {
        let mu = pure_rotation_measure(seed, 2);
        let nu = pure_rotation_measure(seed.wrapping_add(7), 2);
        let band = BandLimit::new(l);
        let x = Vector3::zeros();
        let prod = so3_operator(&convolve(&mu, &nu).unwrap(), &x, band, DEFAULT_MARGIN).matrix;
        let a = so3_operator(&mu, &x, band, DEFAULT_MARGIN).matrix;
        let b = so3_operator(&nu, &x, band, DEFAULT_MARGIN).matrix;
        prop_assert!(max_diff(&prod, &(a * b)) < 1e-10);
    }

    #[test]
    fn symmetric_operators_are_hermitian_contractions(seed in any::<u64>(), l in 1usize..=4, r in 0.0f64..2.5) {
        let mu = symmetric_measure(seed, 2, 0.8);
        let band = BandLimit::new(l);
        let mut rng = SeedStream::new(seed).rng(99);
        let x = random_vector(&mut rng, 1.0).normalize() * r;
        for op in [so3_operator(&mu, &x, band, DEFAULT_MARGIN), sphere_operator(&mu, r, band, DEFAULT_MARGIN)] {
            prop_assert!(op.hermitian_residual() <= 1e-10);
            prop_assert!(op.norm().unwrap().value <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn norms_depend_only_on_the_radius(seed in any::<u64>(), l in 1usize..=4, r in 0.05f64..2.0) {
        let mu = symmetric_measure(seed, 2, 0.6);
        let band = BandLimit::new(l);
        let mut rng = SeedStream::new(seed).rng(5);
        let a = random_vector(&mut rng, 1.0).normalize() * r;
        let b = random_rotation(&mut rng) * a;
        let na = operator_norm(&so3_operator(&mu, &a, band, DEFAULT_MARGIN).matrix).unwrap().value;
        let nb = operator_norm(&so3_operator(&mu, &b, band, DEFAULT_MARGIN).matrix).unwrap().value;
        prop_assert!((na - nb).abs() <= 1e-6);
    }

    #[test]
    fn dumps_round_trip(seed in any::<u64>(), l in 0usize..=3, r in 0.0f64..2.0) {
        let mu = symmetric_measure(seed, 2, 0.5);
        let op = sphere_operator(&mu, r, BandLimit::new(l), DEFAULT_MARGIN);
        let mut buf = Vec::new();
        write_dump(&op, &mut buf).unwrap();
        let back = read_dump(buf.as_slice()).unwrap();
        prop_assert_eq!(back.matrix, op.matrix);
        prop_assert_eq!(back.degree, op.degree);
    }

    #[test]
    fn dirichlet_identity_is_exact(seed in any::<u64>(), r in 0.0f64..2.0) {
        let mu = symmetric_measure(seed, 2, 0.5);
        let band = BandLimit::new(2);
        let samples = random_coefficients(band, 3, seed);
        let x = Vector3::new(r * 0.6, -r * 0.8, 0.0);
        let rep = dirichlet_check(&mu, 0.0, &[x], &samples, band, DEFAULT_MARGIN).unwrap();
        prop_assert!(rep.identity_passed, "{}", rep.points[0].identity_residual);
        prop_assert!(rep.upper_passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn lsg_quotient_is_scale_free_and_monotone(seed in any::<u64>()) {
        let region = Region::unit_ball();
        let gens: Vec<_> = (0..3).map(|k| isometry(seed, k, 0.3)).collect();
        let domain = Domain::enclosing(&region, &gens).unwrap();
        let opts = KappaOptions { rank_cutoff: Some(1e-10) };
        let small = assemble_problem_in(&gens[..2], &region, domain, 1).unwrap();
        let large = assemble_problem_in(&gens, &region, domain, 1).unwrap();
        let e_small = estimate_kappa(&small, &opts).unwrap();
        let e_large = estimate_kappa(&large, &opts).unwrap();
        prop_assert!(e_large.lambda_min >= e_small.lambda_min - 1e-10);
        prop_assert!(e_small.lambda_min >= -1e-10);
        let c = e_small.witness_coefficients();
        let base = rayleigh_quotient(&small, &c);
        for t in [0.1, 10.0] {
            let scaled: Vec<Complex64> = c.iter().map(|z| z * t).collect();
            prop_assert!((rayleigh_quotient(&small, &scaled) - base).abs() <= 1e-10 * base.abs().max(1.0));
        }
    }
}
