//! Harmonic analysis on S² and SO(3): Wigner-D matrices, spherical
//! harmonics, product quadrature and spherical Bessel functions.

pub mod bessel;
pub mod quadrature;
pub mod sphere;
pub mod wigner;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_j, bessel_j_all};
pub use quadrature::{gauss_legendre, gauss_legendre_interval};
pub use sphere::{sh_all, sh_eval, sh_index, sphere_quadrature, SphereQuadrature};
pub use wigner::{wigner_d, wigner_d_all, wigner_small_d_all};

/// Maximum harmonic degree kept in a truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BandLimit(usize);

impl BandLimit {
    pub const fn new(l: usize) -> Self {
        Self(l)
    }

    pub const fn l(self) -> usize {
        self.0
    }

    /// `(L+1)²`, the dimension of harmonics of degree `≤ L` on S².
    pub const fn sphere_dim(self) -> usize {
        (self.0 + 1) * (self.0 + 1)
    }

    /// `Σ_{l≤L} (2l+1)²`, the dimension of the truncated Peter-Weyl basis.
    pub const fn so3_dim(self) -> usize {
        let l = self.0;
        (l + 1) * (2 * l + 1) * (2 * l + 3) / 3
    }
}

/// Smallest degree `p ≥ t` beyond which the plane wave `e^{-it⟨ξ, η⟩}` has
/// negligible harmonic content: `(2l+1)|j_l(t)| < 1e-17` for `l = p, p+1`.
pub fn plane_wave_degree(t: f64) -> usize {
    if t == 0.0 {
        return 0;
    }
    let lmax = (2.0 * t) as usize + 60;
    let j = bessel_j_all(lmax, t);
    let start = t.ceil() as usize;
    (start..lmax)
        .find(|&l| {
            (2 * l + 1) as f64 * j[l].abs() < 1e-17 && (2 * l + 3) as f64 * j[l + 1].abs() < 1e-17
        })
        .unwrap_or(lmax)
}
