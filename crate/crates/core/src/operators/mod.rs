//! Averaging operators in truncated harmonic bases.
//!
//! * [`rotation_blocks`]: the measure acting on rotations only, one block per
//!   degree.
//! * [`sphere_operator`]: `S_r = ∫ ρ_r(g) dμ(g)` on `L²(S²)`, with
//!   `ρ_r(g)φ(ξ) = e(r⟨ξ, v(g)⟩) φ(θ(g)⁻¹ξ)`.
//! * [`so3_operator`]: `T_x = ∫ π_x(g) dμ(g)` on `L²(SO(3))`, with
//!   `π_x(g)φ(ω) = e(⟨ωx, v(g)⟩) φ(θ(g)⁻¹ω)`.
//!
//! Here `e(y) = exp(−2πiy)`.

pub mod assembly;
pub mod blocks;
pub mod dump;
pub mod norm;
pub mod so3;
pub mod sphere_op;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harmonics::BandLimit;

pub use blocks::{gap_from_blocks, rotation_blocks, rotation_gap, RotationBlocks, RotationGap};
pub use norm::{
    dense_norm, hermitian_eigenvalues, hermitian_residual, operator_norm, operator_norm_with, power_norm,
    NormEstimate, NormMethod, NormOptions,
};
pub use so3::{
    euler_quadrature, pw_eval, pw_index, pw_labels, sigma_matrix, so3_axial, so3_norm, so3_operator, AxialOperator,
};
pub use sphere_op::sphere_operator;

/// Default extra quadrature degree beyond `2L`.
pub const DEFAULT_MARGIN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Spherical harmonics `Y_lm`, `l ≤ L`, index `l² + l + m`.
    Sphere,
    /// `√(2l+1)·conj(D^l_mn)`, `l ≤ L`, ordered by `l`, then `m`, then `n`.
    PeterWeyl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    Radius(f64),
    Point([f64; 3]),
}

/// Dense matrix of an averaging operator together with its basis data.
#[derive(Debug, Clone)]
pub struct BandLimitedOperator {
    pub matrix: DMatrix<Complex64>,
    pub basis: Basis,
    pub band: BandLimit,
    pub parameter: Parameter,
    /// Requested minimum extra quadrature degree.
    pub margin: usize,
    /// Quadrature degree actually used.
    pub degree: usize,
    pub label: String,
}

impl BandLimitedOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn norm(&self) -> Result<NormEstimate> {
        operator_norm(&self.matrix)
    }

    pub fn norm_with(&self, opts: &NormOptions) -> Result<NormEstimate> {
        operator_norm_with(&self.matrix, opts)
    }

    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.matrix)
    }
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
