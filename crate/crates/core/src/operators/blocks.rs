//! The operator of a measure on the rotation part alone, one block per
//! harmonic degree.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::group::AtomicMeasure;
use crate::harmonics::{wigner_d_all, BandLimit};

use super::norm::dense_norm;
use super::sphere_op::block_diagonal;

type C = Complex64;

/// Gap threshold below which [`RotationGap::no_gap`] is raised.
pub const NO_GAP_THRESHOLD: f64 = 1e-6;

/// `Σ_g w_g D^l(θ(g))` for `l = 0..=L`, the matrix of `φ ↦ ∫ φ(θ(g)⁻¹ ·) dμ(g)`
/// on each harmonic degree.
#[derive(Debug, Clone)]
pub struct RotationBlocks {
    pub blocks: Vec<DMatrix<C>>,
}

impl RotationBlocks {
    pub fn band(&self) -> BandLimit {
        BandLimit::new(self.blocks.len() - 1)
    }

    /// Operator norm of each block.
    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| dense_norm(b).map(|e| e.value).unwrap_or(f64::NAN)).collect()
    }

    /// Blockwise product.
    pub fn mul(&self, other: &RotationBlocks) -> RotationBlocks {
        RotationBlocks { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    /// Blockwise `ℓ`-th power.
    pub fn pow(&self, ell: usize) -> RotationBlocks {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut acc = DMatrix::<C>::identity(b.nrows(), b.ncols());
                for _ in 0..ell {
                    acc = &acc * b;
                }
                acc
            })
            .collect();
        RotationBlocks { blocks }
    }

    /// Largest entrywise difference over all blocks.
    pub fn max_diff(&self, other: &RotationBlocks) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Direct sum as a single `(L+1)² × (L+1)²` matrix in the sphere basis.
    pub fn to_dense(&self) -> DMatrix<C> {
        block_diagonal(&self.blocks)
    }
}

pub fn rotation_blocks(mu: &AtomicMeasure, band: BandLimit) -> RotationBlocks {
    let lmax = band.l();
    let mut blocks: Vec<DMatrix<C>> = (0..=lmax).map(|l| DMatrix::zeros(2 * l + 1, 2 * l + 1)).collect();
    for (g, w) in mu.atoms() {
        let d = wigner_d_all(lmax, g.rotation());
        for (acc, dl) in blocks.iter_mut().zip(d) {
            *acc += dl * C::new(*w, 0.0);
        }
    }
    blocks[0] = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    RotationBlocks { blocks }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationGap {
    /// `1 − max_{1≤l≤L} ‖block_l‖`.
    pub alpha: f64,
    pub attaining_l: usize,
    pub no_gap: bool,
}

pub fn rotation_gap(mu: &AtomicMeasure, band: BandLimit) -> RotationGap {
    gap_from_blocks(&rotation_blocks(mu, band))
}

pub fn gap_from_blocks(blocks: &RotationBlocks) -> RotationGap {
    let norms = blocks.block_norms();
    let (mut attaining_l, mut worst) = (0, f64::NEG_INFINITY);
    for (l, &n) in norms.iter().enumerate().skip(1) {
        if n > worst {
            worst = n;
            attaining_l = l;
        }
    }
    if attaining_l == 0 {
        return RotationGap { alpha: 1.0, attaining_l: 0, no_gap: false };
    }
    let alpha = 1.0 - worst;
    RotationGap { alpha, attaining_l, no_gap: alpha <= NO_GAP_THRESHOLD }
}
