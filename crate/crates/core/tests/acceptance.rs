//! Acceptance suite: one line per criterion with the measured margins.
//! Runs sequentially so the runtimes are comparable to their limits.

use std::process::ExitCode;
use std::time::Instant;

use isogap_core::group::{convolve, symmetrize};
use isogap_core::io::fmt_f64;
use isogap_core::lsg::{
    assemble_problem, assemble_problem_in, estimate_kappa, lambda_trend, recompute_witness, Domain, KappaOptions,
    Region,
};
use isogap_core::operators::{rotation_blocks, NormOptions, DEFAULT_MARGIN};
use isogap_core::rng::{random_in_ball, random_rotation, random_vector, SeedStream};
use isogap_core::verifier::{
    conjugation_check, constants_matrix_value, constants_oracle, default_grid, dirichlet_check, gap_profile,
    profile_csv, radial_domination_check, random_coefficients, reduction_pipeline, small_x_check, GapProfile,
};
use isogap_core::{shipped, AtomicMeasure, BandLimit, Isometry};
use nalgebra::Vector3;

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn seeded_isometry(stream: &SeedStream, id: u64, scale: f64) -> Isometry {
    let mut rng = stream.rng(id);
    Isometry::new(random_rotation(&mut rng), random_vector(&mut rng, scale)).expect("rotation is orthogonal")
}

fn seeded_symmetric(stream: &SeedStream, id: u64, scale: f64) -> AtomicMeasure {
    let gs = [seeded_isometry(stream, 2 * id, scale), seeded_isometry(stream, 2 * id + 1, scale)];
    symmetrize(&AtomicMeasure::uniform(&gs, format!("seeded-{id}")).expect("valid"))
}

fn algebra() -> Outcome {
    let stream = SeedStream::new(SEED);
    let mut worst_assoc = 0.0f64;
    let mut axioms = true;
    for k in 0..100 {
        let g = seeded_isometry(&stream, 3 * k, 2.0);
        let h = seeded_isometry(&stream, 3 * k + 1, 2.0);
        let f = seeded_isometry(&stream, 3 * k + 2, 2.0);
        worst_assoc = worst_assoc.max(g.compose(&h).compose(&f).distance(&g.compose(&h.compose(&f))));
        axioms &= g.compose(&Isometry::identity()).approx_eq(&g, 1e-12)
            && Isometry::identity().compose(&g).approx_eq(&g, 1e-12)
            && g.compose(&g.inverse()).approx_eq(&Isometry::identity(), 1e-12);
    }
    let band = BandLimit::new(8);
    let mut worst_hom = 0.0f64;
    for k in 0..20 {
        let rot = |id: u64| {
            let gs: Vec<_> = (0..3)
                .map(|j| Isometry::rotation_only(*seeded_isometry(&stream, 1000 + 10 * id + j, 0.0).rotation()).unwrap())
                .collect();
            AtomicMeasure::uniform(&gs, "rot").unwrap()
        };
        let (mu, nu) = (rot(2 * k), rot(2 * k + 1));
        let lhs = rotation_blocks(&convolve(&mu, &nu).unwrap(), band);
        let rhs = rotation_blocks(&mu, band).mul(&rotation_blocks(&nu, band));
        worst_hom = worst_hom.max(lhs.max_diff(&rhs));
    }
    outcome(
        axioms && worst_assoc <= 1e-12 && worst_hom <= 1e-10,
        format!("associativity {worst_assoc:.1e} (<= 1e-12), homomorphism at L=8 {worst_hom:.1e} (<= 1e-10)"),
    )
}

/// Oracle rows for the three shipped measures, as CSV.
fn oracle_csv() -> (String, f64) {
    let band = BandLimit::new(8);
    let mut rng = SeedStream::new(SEED).rng(2);
    let xs: Vec<Vector3<f64>> = (0..20).map(|_| random_in_ball(&mut rng, 1.0)).collect();
    let mut csv = String::from("measure,x,y,z,matrix,oracle\n");
    let mut worst = 0.0f64;
    for mu in shipped::operator_measures() {
        for x in &xs {
            let m = constants_matrix_value(&mu, x, band, DEFAULT_MARGIN);
            let o = constants_oracle(&mu, x).unwrap();
            worst = worst.max((m - o).abs());
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                mu.label(),
                fmt_f64(x.x),
                fmt_f64(x.y),
                fmt_f64(x.z),
                fmt_f64(m),
                fmt_f64(o)
            ));
        }
    }
    (csv, worst)
}

fn oracle(csv: &mut Option<String>) -> Outcome {
    let (text, worst) = oracle_csv();
    *csv = Some(text);
    outcome(worst <= 1e-6, format!("3 measures x 20 points at L=8, max |matrix - oracle| {worst:.2e} (<= 1e-6)"))
}

fn conjugation() -> Outcome {
    let stream = SeedStream::new(SEED ^ 3);
    let band = BandLimit::new(6);
    let measures = shipped::operator_measures();
    let (mut worst_norm, mut worst_matrix) = (0.0f64, 0.0f64);
    for k in 0..10 {
        let mut rng = stream.rng(k);
        let a = random_vector(&mut rng, 0.8);
        let b = random_rotation(&mut rng) * a;
        let rep = conjugation_check(&measures[k as usize % 3], &a, &b, band, DEFAULT_MARGIN).unwrap();
        worst_norm = worst_norm.max(rep.norm_difference);
        worst_matrix = worst_matrix.max(rep.matrix_residual);
    }
    outcome(
        worst_norm <= 1e-6 && worst_matrix <= 1e-8,
        format!("10 pairs at L=6, norm difference {worst_norm:.1e} (<= 1e-6), conjugation residual {worst_matrix:.1e} (<= 1e-8)"),
    )
}

fn radial_domination() -> Outcome {
    let stream = SeedStream::new(SEED ^ 4);
    let mut worst = f64::NEG_INFINITY;
    let mut methods = Vec::new();
    for k in 0..10 {
        let mu = seeded_symmetric(&stream, k, 0.5);
        let mut rng = stream.rng(100 + k);
        let x = random_vector(&mut rng, 0.9);
        for l in [8, 12] {
            let rep = radial_domination_check(&mu, &x, BandLimit::new(l), DEFAULT_MARGIN).unwrap();
            worst = worst.max(rep.difference);
            if k == 0 {
                methods.push(format!("L={l} {}", rep.t_method));
            }
        }
    }
    outcome(
        worst <= 1e-6,
        format!("10 seeded (mu, x) at {}, max ||S|| - ||T|| = {worst:.2e} (<= 1e-6)", methods.join(" and ")),
    )
}

fn small_x() -> Outcome {
    let band = BandLimit::new(6);
    let u = Vector3::new(1.0, 2.0, 3.0).normalize();
    let grid: Vec<_> = (0..20).map(|k| u * (0.05 * k as f64)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for mu in shipped::centered_measures().unwrap() {
        let rep = small_x_check(&mu, &grid, band, DEFAULT_MARGIN).unwrap();
        let slack = |f: &dyn Fn(&isogap_core::verifier::SmallXPoint) -> f64, n: usize| {
            rep.points[..n].iter().map(f).fold(f64::INFINITY, f64::min)
        };
        let n = rep.points.len();
        parts.push(format!(
            "{} prefix |x|<={:.2} slacks {:.1e}/{:.1e}/{:.1e}",
            mu.label(),
            rep.threshold,
            slack(&|p| p.difference_bound.slack, n),
            slack(&|p| p.second_order_bound.slack, n),
            slack(&|p| p.constants_bound.slack, rep.prefix_len.max(1)),
        ));
        ok &= rep.passed && rep.prefix_len >= 2;
    }
    outcome(ok, format!("L=6, {}", parts.join("; ")))
}

fn profile_shape(profiles: &mut Vec<GapProfile>) -> Outcome {
    let mu = shipped::two_generator();
    let opts = NormOptions { seed: SEED, ..NormOptions::default() };
    let p12 = gap_profile(&mu, &default_grid(), BandLimit::new(12), DEFAULT_MARGIN, &opts).unwrap();
    let p16 = gap_profile(&mu, &default_grid(), BandLimit::new(16), DEFAULT_MARGIN, &opts).unwrap();
    let c12 = p12.c0.c0;
    let c16 = p16.c0.c0;
    let exponent = p12.small_r_exponent.unwrap_or(f64::NAN);
    let floor = p12.points.iter().filter(|p| p.r >= 1.0).all(|p| 1.0 - p.norm >= c12 * (1.0 - 1e-3));
    let stable = (c12 - c16).abs() <= 0.2 * c12;
    let truncation = p12
        .points
        .iter()
        .zip(&p16.points)
        .map(|(a, b)| (a.norm - b.norm).abs())
        .fold(0.0, f64::max);
    let passed = c12 > 0.0 && !p12.c0.no_gap && (1.8..=2.2).contains(&exponent) && floor && stable;
    let detail = format!(
        "c0(L=12) {c12:.4} at r={}, c0(L=16) {c16:.4} (change {:.1}% <= 20%), small-r exponent {exponent:.3} in [1.8, 2.2], floor for r>=1 {}, max |norm12 - norm16| {truncation:.1e}",
        p12.c0.attained_at,
        100.0 * (c12 - c16).abs() / c12,
        if floor { "holds" } else { "fails" },
    );
    profiles.push(p12);
    profiles.push(p16);
    outcome(passed, detail)
}

fn reduction() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for mu in shipped::operator_measures() {
        let rep = reduction_pipeline(&mu, BandLimit::new(8), DEFAULT_MARGIN).unwrap();
        let criterion = rep.beta_passed
            && rep.centered_passed
            && rep.power_bound.passed
            && rep.block_identity_residual <= 1e-9
            && rep.truncation_gap.passed;
        ok &= criterion;
        parts.push(format!(
            "{} beta {} ell {} power {:.3} block identity {:.1e} norm-root {}",
            mu.label(),
            rep.beta,
            rep.ell,
            rep.gap_chain.power_norm,
            rep.block_identity_residual,
            if rep.norm_root.iter().all(|p| p.bound.passed) { "holds" } else { "fails" }
        ));
    }
    outcome(ok, format!("L=8, {}", parts.join("; ")))
}

fn dirichlet(c0: f64) -> Outcome {
    let mu = shipped::two_generator();
    let band = BandLimit::new(4);
    let samples = random_coefficients(band, 50, SEED);
    let grid: Vec<_> = (0..10).map(|k| Vector3::new(2.0 * k as f64 / 9.0, 0.0, 0.0)).collect();
    let rep = dirichlet_check(&mu, c0, &grid, &samples, band, DEFAULT_MARGIN).unwrap();
    let id = rep.points.iter().map(|p| p.identity_residual).fold(0.0, f64::max);
    let lo = rep.points.iter().map(|p| p.lower.slack).fold(f64::INFINITY, f64::min);
    let up = rep.points.iter().map(|p| p.upper.slack).fold(f64::INFINITY, f64::min);
    outcome(
        rep.identity_passed && rep.lower_passed && rep.upper_passed,
        format!(
            "50 samples x 10 points at L=4, identity residual {id:.1e} (<= 1e-9), lower slack {lo:.3} with c0 {c0:.4}, upper slack {up:.3} with c1 {:.3}",
            rep.c1
        ),
    )
}

fn lsg() -> Outcome {
    let region = Region::unit_ball();
    let gens = shipped::lsg_generators();
    let strict = KappaOptions::default();
    let p = assemble_problem(&gens, &region, 4).unwrap();
    let est = estimate_kappa(&p, &strict).unwrap();
    let check = recompute_witness(&p, &est);

    // monotonicity: one more generator on a common box
    let extra = *shipped::three_generator().atoms()[0].0.rotation();
    let third = Isometry::new(extra, Vector3::new(0.2, 0.25, -0.18)).unwrap();
    let bigger = [gens[0], gens[1], third];
    let domain = Domain::enclosing(&region, &bigger).unwrap();
    let two = estimate_kappa(&assemble_problem_in(&gens, &region, domain, 3).unwrap(), &strict).unwrap();
    let three = estimate_kappa(&assemble_problem_in(&bigger, &region, domain, 3).unwrap(), &strict).unwrap();
    let monotone = three.lambda_min >= two.lambda_min - 1e-10;

    // translations only
    let translations: Vec<_> = gens.iter().map(|g| Isometry::translation_only(*g.translation())).collect();
    let tdomain = Domain::enclosing(&region, &translations).unwrap();
    let trend = lambda_trend(&translations, &region, tdomain, &[2, 3, 4], &KappaOptions { rank_cutoff: Some(1e-10) })
        .unwrap();
    let values: Vec<String> = trend.iter().map(|(n, e)| format!("N={n} {:.3e}", e.lambda_min)).collect();
    let decreasing = trend.windows(2).all(|w| w[1].1.lambda_min < w[0].1.lambda_min);

    outcome(
        est.lambda_min > 0.0 && check.passed && monotone,
        format!(
            "N=4 lambda_min {:.6} kappa_bound {:.3} (mass cond {:.1e}), witness residuals {:.1e}/{:.1e} (<= 1e-8), monotone {:.4} -> {:.4}, translations-only {} ({})",
            est.lambda_min,
            est.kappa_bound.unwrap_or(f64::INFINITY),
            est.mass_condition,
            check.norm_residual,
            check.energy_residual,
            two.lambda_min,
            three.lambda_min,
            values.join(", "),
            if decreasing { "decreasing" } else { "not decreasing" }
        ),
    )
}

fn determinism(first_oracle: &str, first_profile: &str) -> Outcome {
    let (again, _) = oracle_csv();
    let mu = shipped::two_generator();
    let opts = NormOptions { seed: SEED, ..NormOptions::default() };
    let p = gap_profile(&mu, &default_grid(), BandLimit::new(12), DEFAULT_MARGIN, &opts).unwrap();
    let same_oracle = again == first_oracle;
    let same_profile = profile_csv(&p) == first_profile;
    outcome(
        same_oracle && same_profile,
        format!(
            "oracle CSV {} bytes {}, profile CSV {} bytes {}",
            again.len(),
            if same_oracle { "identical" } else { "differs" },
            first_profile.len(),
            if same_profile { "identical" } else { "differs" }
        ),
    )
}

fn report(n: usize, name: &str, limit_s: f64, run: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = run();
    let secs = t.elapsed().as_secs_f64();
    let passed = out.passed && secs < limit_s;
    println!(
        "criterion {n:>2} [{}] {name}: {} | {secs:.1} s (limit {limit_s} s)",
        if passed { "PASS" } else { "FAIL" },
        out.detail
    );
    passed
}

fn main() -> ExitCode {
    // keep the test harness's filter arguments harmless
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut all = true;
    let mut oracle_text = None;
    let mut profiles = Vec::new();
    all &= report(1, "algebra", 10.0, algebra);
    all &= report(2, "constants oracle", 60.0, || oracle(&mut oracle_text));
    all &= report(3, "equal radii give equal norms", 120.0, conjugation);
    all &= report(4, "sphere model is dominated", 120.0, radial_domination);
    all &= report(5, "small |x| inequalities", 120.0, small_x);
    all &= report(6, "gap profile shape", 600.0, || profile_shape(&mut profiles));
    all &= report(7, "reduction pipeline", 60.0, reduction);
    let c0 = profiles.first().map(|p| p.c0.c0).unwrap_or(0.0);
    all &= report(8, "Dirichlet form bounds", 120.0, || dirichlet(c0));
    all &= report(9, "local spectral gap estimator", 300.0, lsg);
    let first_profile = profiles.first().map(profile_csv).unwrap_or_default();
    let first_oracle = oracle_text.unwrap_or_default();
    all &= report(10, "determinism", 120.0, || determinism(&first_oracle, &first_profile));
    println!("acceptance: {}", if all { "all criteria pass" } else { "some criteria FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
