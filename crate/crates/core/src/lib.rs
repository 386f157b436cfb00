//! Averaging operators of finitely supported symmetric measures on the
//! orientation-preserving isometry group of R^3.
//!
//! The crate builds the operators `T_x = π_x(μ)` on L²(SO(3)) and
//! `S_r = ρ_r(μ)` on L²(S²) in truncated harmonic bases, estimates their
//! norms, and checks the quantitative inequalities behind the bound
//! `‖T_x‖ ≤ 1 − c₀ min(|x|², 1)`. A separate module estimates local spectral
//! gap constants for the action on R^3 via a constrained Rayleigh quotient.

pub mod error;
pub mod group;
pub mod harmonics;
pub mod io;
pub mod lsg;
pub mod operators;
pub mod rng;
pub mod shipped;
pub mod verifier;

pub use error::{Error, Result};
pub use group::{AtomicMeasure, Isometry, MomentSummary};
pub use harmonics::BandLimit;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
