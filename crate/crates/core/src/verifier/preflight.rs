//! Hypotheses required for a spectral gap.

use crate::error::{Error, Result};
use crate::group::{common_fixed_point, AtomicMeasure};
use crate::harmonics::BandLimit;
use crate::operators::{rotation_gap, RotationGap};

/// Checks that `μ` is symmetric, that its rotation part has a gap on
/// degrees `1..=L` (assumption 1) and that no point of R^3 is fixed by every
/// atom (assumption 2). Returns the measured gap.
pub fn preflight(mu: &AtomicMeasure, band: BandLimit) -> Result<RotationGap> {
    if !mu.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let gap = rotation_gap(mu, band);
    if gap.no_gap {
        return Err(Error::NoRotationGap(gap.alpha));
    }
    if let Some(p) = common_fixed_point(mu) {
        return Err(Error::CommonFixedPoint([p.x, p.y, p.z]));
    }
    Ok(gap)
}
