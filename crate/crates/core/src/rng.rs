//! Seeded randomness.
//!
//! Every random draw in the crate comes from a [`SeedStream`]: a ChaCha
//! generator keyed by one 64-bit seed, split into independent numbered
//! streams. Results therefore do not depend on scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for stream `id`.
    pub fn rng(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }
}

/// Haar-random rotation matrix (uniform unit quaternion).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    loop {
        let q = nalgebra::Quaternion::new(
            gaussian(rng),
            gaussian(rng),
            gaussian(rng),
            gaussian(rng),
        );
        if q.norm() > 1e-6 {
            return UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner();
        }
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, scale: f64) -> Vector3<f64> {
    Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng)) * scale
}

/// Uniform point on the unit sphere.
pub fn random_unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = random_vector(rng, 1.0);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Uniform point in the ball of the given radius.
pub fn random_in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vector3<f64> {
    let u: f64 = rng.random();
    random_unit_vector(rng) * (radius * u.cbrt())
}

/// Standard normal draw via Box-Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
