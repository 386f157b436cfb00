//! Truncation, centering and convolution power: the chain of measures that
//! reduces a general measure with a rotation gap to a centered one whose
//! rotation part contracts by at least one half.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{center, common_fixed_point, convolution_power, truncate_restrict, AtomicMeasure};
use crate::harmonics::BandLimit;
use crate::operators::{gap_from_blocks, rotation_blocks, sphere_operator};

use super::preflight::preflight;
use super::Bound;

/// Radii at which the norm-root relation is spot-checked.
pub const PROBE_RADII: [f64; 3] = [0.25, 0.75, 1.5];

#[derive(Debug, Clone, Serialize)]
pub struct StageSummary {
    pub label: String,
    pub atoms: usize,
    pub rotation_gap: f64,
    pub mean_translation: f64,
    pub max_radius: f64,
}

impl StageSummary {
    fn of(mu: &AtomicMeasure, gap: f64) -> Self {
        let m = mu.moments();
        Self {
            label: mu.label().to_string(),
            atoms: mu.len(),
            rotation_gap: gap,
            mean_translation: m.mean_translation.norm(),
            max_radius: m.max_radius,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRootPoint {
    pub r: f64,
    pub norm: f64,
    pub power_norm: f64,
    /// `‖S_r(μ)‖ ≤ ‖S_r(μ₂)‖^{1/ℓ} + 1e−6`.
    pub bound: Bound,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapChain {
    pub alpha: f64,
    /// `(1 − α + β)/(1 − β)`, the bound on the rotation norm after truncation.
    pub truncated_norm_bound: f64,
    /// `‖π₀(μ₁)‖^ℓ` on the nontrivial blocks.
    pub power_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    #[serde(rename = "L")]
    pub band: usize,
    pub s_chosen: f64,
    pub beta: f64,
    pub fixed_point_a: [f64; 3],
    pub ell: usize,
    pub original: StageSummary,
    pub truncated: StageSummary,
    pub centered: StageSummary,
    pub powered: StageSummary,
    pub gap_chain: GapChain,
    /// `β < α/2`.
    pub beta_passed: bool,
    /// `α_s ≥ 1 − (1−α+β)/(1−β) − 1e−8`.
    pub truncation_gap: Bound,
    /// Mean translation of `μ₂` at most `1e−10`.
    pub centered_passed: bool,
    /// `(1 − α₁)^ℓ ≤ ½ + 1e−10`.
    pub power_bound: Bound,
    /// Largest entry of `π₀(μ₂) − π₀(μ₁)^ℓ`.
    pub block_identity_residual: f64,
    /// Largest nontrivial block norm of `μ₂`, computed directly.
    pub powered_block_norm: f64,
    pub norm_root: Vec<NormRootPoint>,
    pub passed: bool,
}

/// Runs the reduction on `μ` with rotation blocks truncated at `band`,
/// choosing the truncation radius automatically.
pub fn reduction_pipeline(mu: &AtomicMeasure, band: BandLimit, margin: usize) -> Result<ReductionReport> {
    reduction_pipeline_at(mu, band, margin, None)
}

/// As [`reduction_pipeline`], optionally with a fixed truncation radius `s`.
pub fn reduction_pipeline_at(
    mu: &AtomicMeasure,
    band: BandLimit,
    margin: usize,
    s: Option<f64>,
) -> Result<ReductionReport> {
    let gap = preflight(mu, band)?;
    let alpha = gap.alpha;

    let (s, mu_s, beta, alpha_s) = match s {
        Some(s) => {
            let (mu_s, beta) = truncate_restrict(mu, s)?;
            if let Some(x) = common_fixed_point(&mu_s) {
                return Err(Error::CommonFixedPoint([x.x, x.y, x.z]));
            }
            let gs = gap_from_blocks(&rotation_blocks(&mu_s, band));
            if gs.no_gap {
                return Err(Error::NoRotationGap(gs.alpha));
            }
            (s, mu_s, beta, gs.alpha)
        }
        None => choose_truncation(mu, band, alpha)?,
    };
    let truncated_norm_bound = (1.0 - alpha + beta) / (1.0 - beta);
    let truncation_gap = Bound::le(1.0 - truncated_norm_bound - 1e-8, alpha_s);

    let (mu1, a) = center(&mu_s)?;
    let blocks1 = rotation_blocks(&mu1, band);
    let alpha1 = gap_from_blocks(&blocks1).alpha;
    let rho = 1.0 - alpha1;
    let mut ell = 1;
    while rho.powi(ell as i32) > 0.5 {
        ell += 1;
    }
    let mu2 = convolution_power(&mu1, ell)?;
    let blocks2 = rotation_blocks(&mu2, band);
    let block_identity_residual = blocks2.max_diff(&blocks1.pow(ell));
    let powered_block_norm = blocks2.block_norms().iter().skip(1).copied().fold(0.0, f64::max);
    let power_norm = rho.powi(ell as i32);
    let power_bound = Bound::le(power_norm, 0.5 + 1e-10);

    let mut norm_root = Vec::with_capacity(PROBE_RADII.len());
    for &r in &PROBE_RADII {
        let norm = sphere_operator(mu, r, band, margin).norm()?.value;
        let power_norm = sphere_operator(&mu2, r, band, margin).norm()?.value;
        let bound = Bound::le(norm, power_norm.max(0.0).powf(1.0 / ell as f64) + 1e-6);
        norm_root.push(NormRootPoint { r, norm, power_norm, bound });
    }

    let beta_passed = beta < alpha / 2.0;
    let centered_passed = mu2.moments().mean_translation.norm() <= 1e-10;
    let passed = beta_passed
        && truncation_gap.passed
        && centered_passed
        && power_bound.passed
        && block_identity_residual <= 1e-9
        && norm_root.iter().all(|p| p.bound.passed);
    Ok(ReductionReport {
        band: band.l(),
        s_chosen: s,
        beta,
        fixed_point_a: [a.x, a.y, a.z],
        ell,
        original: StageSummary::of(mu, alpha),
        truncated: StageSummary::of(&mu_s, alpha_s),
        centered: StageSummary::of(&mu1, alpha1),
        powered: StageSummary::of(&mu2, 1.0 - powered_block_norm),
        gap_chain: GapChain { alpha, truncated_norm_bound, power_norm },
        beta_passed,
        truncation_gap,
        centered_passed,
        power_bound,
        block_identity_residual,
        powered_block_norm,
        norm_root,
        passed,
    })
}

/// Smallest atom radius `s` with `β < α/2` whose truncation keeps a gap and
/// has no common fixed point.
fn choose_truncation(mu: &AtomicMeasure, band: BandLimit, alpha: f64) -> Result<(f64, AtomicMeasure, f64, f64)> {
    let mut radii: Vec<f64> = mu.atoms().iter().map(|(g, _)| g.translation().norm()).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    for &s in &radii {
        let (mu_s, beta) = truncate_restrict(mu, s)?;
        if beta >= alpha / 2.0 || common_fixed_point(&mu_s).is_some() {
            continue;
        }
        let gs = gap_from_blocks(&rotation_blocks(&mu_s, band));
        if !gs.no_gap {
            return Ok((s, mu_s, beta, gs.alpha));
        }
    }
    // The largest radius keeps every atom, so this is only reached when
    // preflight would already have failed.
    Err(Error::NoRotationGap(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    use crate::group::Isometry;
    use crate::operators::DEFAULT_MARGIN;
    use crate::shipped;

    #[test]
    fn shipped_two_generator_chain() {
        let band = BandLimit::new(6);
        let rep = reduction_pipeline(&shipped::two_generator(), band, DEFAULT_MARGIN).unwrap();
        assert!(rep.beta_passed && rep.centered_passed && rep.power_bound.passed);
        assert!(rep.truncation_gap.passed);
        assert!(rep.block_identity_residual < 1e-9, "{}", rep.block_identity_residual);
        assert!((rep.powered_block_norm - rep.gap_chain.power_norm).abs() < 1e-9);
        // minimality of ℓ
        assert!((1.0 - rep.centered.rotation_gap).powi(rep.ell as i32 - 1) > 0.5 || rep.ell == 1);
    }

    #[test]
    fn compact_centered_measure_is_nearly_fixed() {
        let mu = shipped::screw();
        let rep = reduction_pipeline(&mu, BandLimit::new(4), DEFAULT_MARGIN).unwrap();
        assert_eq!(rep.beta, 0.0);
        assert!((rep.s_chosen - mu.moments().max_radius).abs() < 1e-15);
        assert!(Vector3::from(rep.fixed_point_a).norm() < 1e-10);
    }

    #[test]
    fn pure_rotation_fails_assumption_two() {
        let err = reduction_pipeline(&shipped::pure_rotation(), BandLimit::new(4), DEFAULT_MARGIN).unwrap_err();
        assert!(matches!(err, Error::CommonFixedPoint(_)));
    }

    #[test]
    fn far_atom_is_truncated() {
        // A light, distant pair is dropped once its mass is below α/2.
        let base = shipped::two_generator();
        let far = Isometry::translation_only(Vector3::new(6.0, 0.0, 0.0));
        let mut atoms: Vec<_> = base.atoms().iter().map(|(g, w)| (*g, w * 0.98)).collect();
        atoms.push((far, 0.01));
        atoms.push((far.inverse(), 0.01));
        let mu = AtomicMeasure::new(atoms, "with-far-pair").unwrap();
        let rep = reduction_pipeline(&mu, BandLimit::new(4), DEFAULT_MARGIN).unwrap();
        assert!(rep.s_chosen < 6.0);
        assert!((rep.beta - 0.02).abs() < 1e-12);
        assert!(rep.truncation_gap.passed);
        let fixed = reduction_pipeline_at(&mu, BandLimit::new(4), DEFAULT_MARGIN, Some(6.0)).unwrap();
        assert_eq!(fixed.beta, 0.0);
        assert!(matches!(
            reduction_pipeline_at(&mu, BandLimit::new(4), DEFAULT_MARGIN, Some(0.01)),
            Err(Error::EmptyTruncation(_))
        ));
    }
}
