//! The gap profile `r ↦ 1 − ‖S_r‖` and the fitted constant `c₀`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::AtomicMeasure;
use crate::harmonics::BandLimit;
use crate::io::fmt_f64;
use crate::operators::{sphere_operator, NormMethod, NormOptions, RotationGap};

use super::preflight::preflight;

/// Ratios at or below this count as no gap.
pub const NO_GAP_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub r: f64,
    pub norm: f64,
    pub residual: f64,
    pub method: NormMethod,
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C0Fit {
    pub c0: f64,
    /// Grid radius where the minimum ratio is attained.
    pub attained_at: f64,
    pub no_gap: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapProfile {
    pub label: String,
    #[serde(rename = "L")]
    pub band: BandLimit,
    pub margin: usize,
    pub points: Vec<ProfilePoint>,
    pub rotation_gap: RotationGap,
    pub c0: C0Fit,
    /// Least-squares slope of `log(1 − ‖S_r‖)` against `log r` for
    /// `0 < r ≤ 0.3`.
    pub small_r_exponent: Option<f64>,
}

impl GapProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.r).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.norm).collect()
    }
}

/// `{0, 0.1, …, 2.0}`.
pub fn default_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 10.0).collect()
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidArgument("radii must be finite and nonnegative".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radius grid must be strictly increasing".into()));
    }
    if grid[0] != 0.0 || *grid.last().expect("nonempty") < 1.0 {
        return Err(Error::InvalidArgument("radius grid must contain 0 and a point >= 1".into()));
    }
    Ok(())
}

pub fn gap_profile(
    mu: &AtomicMeasure,
    grid: &[f64],
    band: BandLimit,
    margin: usize,
    opts: &NormOptions,
) -> Result<GapProfile> {
    validate_grid(grid)?;
    let rotation_gap = preflight(mu, band)?;
    let points = grid
        .par_iter()
        .map(|&r| {
            let op = sphere_operator(mu, r, band, margin);
            let est = op.norm_with(opts)?;
            Ok(ProfilePoint { r, norm: est.value, residual: est.residual, method: est.method, degree: op.degree })
        })
        .collect::<Result<Vec<_>>>()?;
    let radii: Vec<f64> = points.iter().map(|p| p.r).collect();
    let norms: Vec<f64> = points.iter().map(|p| p.norm).collect();
    Ok(GapProfile {
        label: mu.label().to_string(),
        band,
        margin,
        c0: fit_c0(&radii, &norms),
        small_r_exponent: small_r_exponent(&radii, &norms, 0.3),
        points,
        rotation_gap,
    })
}

/// `c₀ = min_{r>0} (1 − ‖S_r‖) / min(r², 1)`, or zero with the flag set when
/// some ratio is at most [`NO_GAP_RATIO`].
pub fn fit_c0(radii: &[f64], norms: &[f64]) -> C0Fit {
    let mut best = C0Fit { c0: f64::INFINITY, attained_at: f64::NAN, no_gap: false };
    for (&r, &n) in radii.iter().zip(norms) {
        if r <= 0.0 {
            continue;
        }
        let ratio = (1.0 - n) / (r * r).min(1.0);
        if ratio < best.c0 {
            best.c0 = ratio;
            best.attained_at = r;
        }
    }
    if !(best.c0 > NO_GAP_RATIO) {
        best.c0 = 0.0;
        best.no_gap = true;
    }
    best
}

/// Slope of the least-squares line through `(log r, log(1 − ‖S_r‖))` over
/// grid points with `0 < r ≤ r_max`.
pub fn small_r_exponent(radii: &[f64], norms: &[f64], r_max: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(norms)
        .filter(|(r, n)| **r > 0.0 && **r <= r_max + 1e-12 && **n < 1.0)
        .map(|(r, n)| (r.ln(), (1.0 - n).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// CSV with header `r,norm,one_minus_norm,L,margin,method,residual`.
pub fn profile_csv(profile: &GapProfile) -> String {
    let mut out = String::from("r,norm,one_minus_norm,L,margin,method,residual\n");
    for p in &profile.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(p.r),
            fmt_f64(p.norm),
            fmt_f64(1.0 - p.norm),
            profile.band.l(),
            profile.margin,
            p.method.as_str(),
            fmt_f64(p.residual)
        ));
    }
    out
}
