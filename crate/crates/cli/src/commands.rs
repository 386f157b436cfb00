//! One function per subcommand. Each returns its artifacts; nothing touches
//! the filesystem here.

use isogap_core::io::fmt_f64;
use isogap_core::lsg::{
    assemble_problem, assemble_problem_in, estimate_kappa, recompute_witness, witness_csv, KappaOptions, Region,
};
use isogap_core::operators::{rotation_blocks, NormOptions, DEFAULT_MARGIN};
use isogap_core::rng::{random_in_ball, random_rotation, SeedStream};
use isogap_core::verifier::{
    conjugation_check, constants_matrix_value, constants_oracle, default_grid, dirichlet_check, gap_profile,
    preflight, profile_csv, radial_domination_check, random_coefficients, reduction_pipeline_at, small_x_check,
    ConjugationReport, DirichletReport, RadialDominationReport, SmallXReport,
};
use isogap_core::{group::center, AtomicMeasure, BandLimit, Result};
use nalgebra::Vector3;
use serde::Serialize;

use crate::config::{Command, ResolvedJob};
use crate::output::Artifacts;

const STREAM_VERIFY_ROTATIONS: u64 = 1;
const STREAM_ORACLE_POINTS: u64 = 2;

pub fn run(job: &ResolvedJob) -> Result<Artifacts> {
    let mut out = Artifacts::default();
    match job.command {
        Command::RotationGap => rotation_gap(job, &mut out)?,
        Command::Profile => profile(job, &mut out)?,
        Command::Verify => verify(job, &mut out)?,
        Command::Reduce => reduce(job, &mut out)?,
        Command::Lsg => lsg(job, &mut out)?,
        Command::Oracle => oracle(job, &mut out)?,
    }
    Ok(out)
}

fn band(job: &ResolvedJob, default: usize) -> BandLimit {
    BandLimit::new(job.parameters.band.unwrap_or(default))
}

fn margin(job: &ResolvedJob) -> usize {
    job.parameters.margin.unwrap_or(DEFAULT_MARGIN)
}

fn measure(job: &ResolvedJob) -> Result<AtomicMeasure> {
    job.generator_set.measure()
}

fn norm_options(job: &ResolvedJob) -> NormOptions {
    NormOptions { seed: job.seed, ..NormOptions::default() }
}

fn vectors(points: &[[f64; 3]]) -> Vec<Vector3<f64>> {
    points.iter().map(|p| Vector3::from(*p)).collect()
}

#[derive(Serialize)]
struct RotationGapOut<'a> {
    label: &'a str,
    #[serde(rename = "L")]
    band: usize,
    alpha: f64,
    attaining_l: usize,
    no_gap: bool,
    block_norms: Vec<f64>,
}

fn rotation_gap(job: &ResolvedJob, out: &mut Artifacts) -> Result<()> {
    let mu = measure(job)?;
    let band = band(job, 8);
    let blocks = rotation_blocks(&mu, band);
    let gap = isogap_core::operators::gap_from_blocks(&blocks);
    out.add_json(
        "rotation_gap.json",
        &RotationGapOut {
            label: mu.label(),
            band: band.l(),
            alpha: gap.alpha,
            attaining_l: gap.attaining_l,
            no_gap: gap.no_gap,
            block_norms: blocks.block_norms(),
        },
    )
}

fn profile(job: &ResolvedJob, out: &mut Artifacts) -> Result<()> {
    let mu = measure(job)?;
    let grid = job.parameters.r_grid.clone().unwrap_or_else(default_grid);
    let prof = gap_profile(&mu, &grid, band(job, 12), margin(job), &norm_options(job))?;
    out.add("profile.csv", profile_csv(&prof));
    out.add_json("profile.json", &prof)
}

#[derive(Serialize)]
struct ConjugationOut {
    a: [f64; 3],
    b: [f64; 3],
    report: ConjugationReport,
}

#[derive(Serialize)]
struct RadialOut {
    x: [f64; 3],
    report: RadialDominationReport,
}

#[derive(Serialize)]
struct VerifyOut {
    label: String,
    #[serde(rename = "L")]
    band: usize,
    margin: usize,
    alpha: f64,
    conjugation: Vec<ConjugationOut>,
    radial_domination: Vec<RadialOut>,
    small_x: SmallXReport,
    c0_source: &'static str,
    dirichlet: DirichletReport,
    all_passed: bool,
}

fn default_x_grid() -> Vec<[f64; 3]> {
    vec![[0.7, 0.0, 0.0], [0.3, -0.4, 0.5], [1.2, 0.5, -0.3]]
}

/// `k·0.05·u` for `k = 0, …, 19` along a fixed generic direction `u`.
pub fn default_small_x_grid() -> Vec<[f64; 3]> {
    let u = Vector3::new(1.0, 2.0, 3.0).normalize();
    (0..20).map(|k| (u * (0.05 * k as f64)).into()).collect()
}

/// Ten points spaced evenly along `[0, 2]·e₁`.
pub fn default_dirichlet_grid() -> Vec<[f64; 3]> {
    (0..10).map(|k| [2.0 * k as f64 / 9.0, 0.0, 0.0]).collect()
}

fn verify(job: &ResolvedJob, out: &mut Artifacts) -> Result<()> {
    let p = &job.parameters;
    let mu = measure(job)?;
    let band = band(job, 6);
    let margin = margin(job);
    let gap = preflight(&mu, band)?;
    let xs = vectors(&p.x_grid.clone().unwrap_or_else(default_x_grid));

    let mut rng = SeedStream::new(job.seed).rng(STREAM_VERIFY_ROTATIONS);
    let mut conjugation = Vec::new();
    for a in &xs {
        let b = random_rotation(&mut rng) * a;
        let report = conjugation_check(&mu, a, &b, band, margin)?;
        conjugation.push(ConjugationOut { a: (*a).into(), b: b.into(), report });
    }
    let radial_domination = xs
        .iter()
        .map(|x| Ok(RadialOut { x: (*x).into(), report: radial_domination_check(&mu, x, band, margin)? }))
        .collect::<Result<Vec<_>>>()?;

    let (centered, _) = center(&mu)?;
    let small = vectors(&p.small_x_grid.clone().unwrap_or_else(default_small_x_grid));
    let small_x = small_x_check(&centered, &small, band, margin)?;

    let (c0, c0_source) = match p.c0 {
        Some(c0) => (c0, "config"),
        None => {
            let prof = gap_profile(&mu, &default_grid(), BandLimit::new(p.profile_band.unwrap_or(12)), margin, &norm_options(job))?;
            (prof.c0.c0, "fitted")
        }
    };
    let dband = BandLimit::new(p.dirichlet_band.unwrap_or(4));
    let samples = random_coefficients(dband, p.samples.unwrap_or(50), job.seed);
    let dgrid = vectors(&p.dirichlet_x_grid.clone().unwrap_or_else(default_dirichlet_grid));
    let dirichlet = dirichlet_check(&mu, c0, &dgrid, &samples, dband, margin)?;

    let all_passed = conjugation.iter().all(|c| c.report.passed)
        && radial_domination.iter().all(|r| r.report.passed)
        && small_x.passed
        && dirichlet.identity_passed
        && dirichlet.lower_passed
        && dirichlet.upper_passed;
    out.add_json(
        "verify.json",
        &VerifyOut {
            label: mu.label().to_string(),
            band: band.l(),
            margin,
            alpha: gap.alpha,
            conjugation,
            radial_domination,
            small_x,
            c0_source,
            dirichlet,
            all_passed,
        },
    )
}

fn reduce(job: &ResolvedJob, out: &mut Artifacts) -> Result<()> {
    let mu = measure(job)?;
    let report = reduction_pipeline_at(&mu, band(job, 8), margin(job), job.parameters.s)?;
    out.add_json("reduction.json", &report)
}

#[derive(Serialize)]
struct LsgOut<'a, E: Serialize, W: Serialize> {
    label: &'a str,
    generators: usize,
    region: Region,
    domain: isogap_core::lsg::Domain,
    #[serde(rename = "N")]
    n: usize,
    basis_dim: usize,
    rank_cutoff: Option<f64>,
    estimate: E,
    witness_check: W,
    note: &'static str,
}

fn lsg(job: &ResolvedJob, out: &mut Artifacts) -> Result<()> {
    let p = &job.parameters;
    let generators = job.generator_set.generators()?;
    let region = p.region.unwrap_or_else(Region::unit_ball);
    let n = p.n.unwrap_or(4);
    let problem = match p.domain {
        Some(d) => assemble_problem_in(&generators, &region, d, n)?,
        None => assemble_problem(&generators, &region, n)?,
    };
    let estimate = estimate_kappa(&problem, &KappaOptions { rank_cutoff: p.rank_cutoff })?;
    let check = recompute_witness(&problem, &estimate);
    if let Some(g) = p.witness_grid {
        out.add("witness.csv", witness_csv(&problem, &estimate, g));
    }
    out.add_json(
        "lsg.json",
        &LsgOut {
            label: &job.generator_set.label,
            generators: generators.len(),
            region,
            domain: problem.basis.domain,
            n,
            basis_dim: problem.basis.dim(),
            rank_cutoff: p.rank_cutoff,
            estimate: &estimate,
            witness_check: &check,
            note: "no violation witness found below kappa_bound within the test space",
        },
    )
}

/// Twenty seeded points, the first at the origin.
pub fn oracle_points(seed: u64) -> Vec<[f64; 3]> {
    let mut rng = SeedStream::new(seed).rng(STREAM_ORACLE_POINTS);
    (0..20)
        .map(|k| if k == 0 { [0.0; 3] } else { random_in_ball(&mut rng, 1.0).into() })
        .collect()
}

fn oracle(job: &ResolvedJob, out: &mut Artifacts) -> Result<()> {
    let mu = measure(job)?;
    let band = band(job, 8);
    let margin = margin(job);
    let xs = job.parameters.x_grid.clone().unwrap_or_else(|| oracle_points(job.seed));
    let mut csv = String::from("x,y,z,matrix,oracle,difference\n");
    for p in &xs {
        let x = Vector3::from(*p);
        let matrix = constants_matrix_value(&mu, &x, band, margin);
        let oracle = constants_oracle(&mu, &x)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(x.x),
            fmt_f64(x.y),
            fmt_f64(x.z),
            fmt_f64(matrix),
            fmt_f64(oracle),
            fmt_f64(matrix - oracle)
        ));
    }
    out.add("oracle.csv", csv);
    Ok(())
}
