//! Regions, enclosing boxes and integrals of plane waves over them.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Isometry;
use crate::harmonics::{gauss_legendre_interval, plane_wave_degree, SphereQuadrature};

type C = Complex64;

const CONTAINMENT_TOL: f64 = 1e-12;

/// A bounded region of ℝ³ carrying Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    Ball { center: [f64; 3], radius: f64 },
    Box { center: [f64; 3], half_widths: [f64; 3] },
}

impl Region {
    pub fn unit_ball() -> Self {
        Region::Ball { center: [0.0; 3], radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Region::Ball { center, radius } => center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0,
            Region::Box { center, half_widths } => {
                center.iter().all(|c| c.is_finite()) && half_widths.iter().all(|h| h.is_finite() && *h > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("degenerate region {self:?}")))
        }
    }

    pub fn center(&self) -> Vector3<f64> {
        match self {
            Region::Ball { center, .. } | Region::Box { center, .. } => Vector3::from(*center),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
            Region::Box { half_widths, .. } => 8.0 * half_widths.iter().product::<f64>(),
        }
    }

    /// Radius of the smallest ball about the center containing the region.
    pub fn circumradius(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } => *radius,
            Region::Box { half_widths, .. } => Vector3::from(*half_widths).norm(),
        }
    }

    /// Points whose images bound the image of the region under an isometry:
    /// box corners, or the center together with the radius.
    fn image_bounds(&self, g: &Isometry) -> (Vector3<f64>, Vector3<f64>) {
        match self {
            Region::Ball { radius, .. } => {
                let c = g.apply(&self.center());
                let r = Vector3::repeat(*radius);
                (c - r, c + r)
            }
            Region::Box { half_widths, .. } => {
                let c = self.center();
                let mut lo = Vector3::repeat(f64::INFINITY);
                let mut hi = Vector3::repeat(f64::NEG_INFINITY);
                for s in 0..8 {
                    let corner = Vector3::from_fn(|a, _| {
                        let sign = if s >> a & 1 == 1 { 1.0 } else { -1.0 };
                        c[a] + sign * half_widths[a]
                    });
                    let p = g.apply(&corner);
                    lo = lo.inf(&p);
                    hi = hi.sup(&p);
                }
                (lo, hi)
            }
        }
    }

    /// `∫_B exp(2πi⟨ξ, y⟩) dy`.
    pub fn plane_wave_integral(&self, xi: &Vector3<f64>) -> C {
        let phase = C::from_polar(1.0, TAU * xi.dot(&self.center()));
        match self {
            Region::Ball { radius, .. } => {
                let t = TAU * xi.norm() * radius;
                phase * (4.0 * PI * radius.powi(3) * j1_over_t(t))
            }
            Region::Box { half_widths, .. } => {
                let mut v = 1.0;
                for a in 0..3 {
                    v *= 2.0 * half_widths[a] * sinc(TAU * xi[a] * half_widths[a]);
                }
                phase * v
            }
        }
    }

    /// Product rule on the region with positive weights summing to its
    /// volume, accurate for `|f|²` when `f` is a sum of plane waves of
    /// frequency at most `max_frequency`.
    pub fn quadrature(&self, max_frequency: f64) -> RegionQuadrature {
        let c = self.center();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match self {
            Region::Ball { radius, .. } => {
                let t = TAU * 2.0 * max_frequency * radius;
                let degree = plane_wave_degree(t) + 4;
                let sphere = SphereQuadrature::with_degree(degree);
                let (rs, wr) = gauss_legendre_interval(degree / 2 + 8, 0.0, *radius);
                for (r, w) in rs.iter().zip(&wr) {
                    for (x, ws) in sphere.nodes.iter().zip(&sphere.weights) {
                        nodes.push(c + x * *r);
                        weights.push(4.0 * PI * r * r * w * ws);
                    }
                }
            }
            Region::Box { half_widths, .. } => {
                let axes: Vec<_> = (0..3)
                    .map(|a| {
                        let t = TAU * 2.0 * max_frequency * half_widths[a];
                        gauss_legendre_interval(plane_wave_degree(t) / 2 + 8, c[a] - half_widths[a], c[a] + half_widths[a])
                    })
                    .collect();
                for (x, wx) in axes[0].0.iter().zip(&axes[0].1) {
                    for (y, wy) in axes[1].0.iter().zip(&axes[1].1) {
                        for (z, wz) in axes[2].0.iter().zip(&axes[2].1) {
                            nodes.push(Vector3::new(*x, *y, *z));
                            weights.push(wx * wy * wz);
                        }
                    }
                }
            }
        }
        RegionQuadrature { nodes, weights }
    }
}

#[derive(Debug, Clone)]
pub struct RegionQuadrature {
    pub nodes: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `j₁(t)/t = (sin t − t cos t)/t³`, with a series near zero.
fn j1_over_t(t: f64) -> f64 {
    if t < 0.5 {
        let t2 = t * t;
        // Σ_{k≥1} (−1)^{k+1} 2k t^{2k−2} / (2k+1)!
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for k in 1..12 {
            let kf = k as f64;
            term *= -t2 * (kf + 1.0) / (kf * (2.0 * kf + 2.0) * (2.0 * kf + 3.0));
            sum += term;
        }
        sum
    } else {
        (t.sin() - t * t.cos()) / (t * t * t)
    }
}

/// Axis-aligned box `[lo, hi]` carrying the trigonometric basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Domain {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        if (0..3).all(|a| lo[a].is_finite() && hi[a].is_finite() && hi[a] > lo[a]) {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidArgument(format!("degenerate box {lo:?}..{hi:?}")))
        }
    }

    /// Smallest box containing `B` and every `g⁻¹B`.
    pub fn enclosing(region: &Region, generators: &[Isometry]) -> Result<Self> {
        region.validate()?;
        let (mut lo, mut hi) = region.image_bounds(&Isometry::identity());
        for g in generators {
            let (a, b) = region.image_bounds(&g.inverse());
            lo = lo.inf(&a);
            hi = hi.sup(&b);
        }
        Self::new(lo.into(), hi.into())
    }

    pub fn lengths(&self) -> Vector3<f64> {
        Vector3::from(self.hi) - Vector3::from(self.lo)
    }

    fn contains_box(&self, lo: &Vector3<f64>, hi: &Vector3<f64>) -> bool {
        (0..3).all(|a| lo[a] >= self.lo[a] - CONTAINMENT_TOL && hi[a] <= self.hi[a] + CONTAINMENT_TOL)
    }

    /// Errors unless `B` and every `g⁻¹B` lie inside.
    pub fn check_contains(&self, region: &Region, generators: &[Isometry]) -> Result<()> {
        region.validate()?;
        let (lo, hi) = region.image_bounds(&Isometry::identity());
        if !self.contains_box(&lo, &hi) {
            return Err(Error::RegionEscapes("the region itself".into()));
        }
        for (k, g) in generators.iter().enumerate() {
            let (lo, hi) = region.image_bounds(&g.inverse());
            if !self.contains_box(&lo, &hi) {
                return Err(Error::RegionEscapes(format!("preimage under generator {k}")));
            }
        }
        Ok(())
    }
}
