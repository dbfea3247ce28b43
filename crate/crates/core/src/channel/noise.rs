use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{require_non_negative, Result};
use crate::geometry::Vec3;

const TERMS: usize = 3;
const WEIGHTS: [f64; TERMS] = [0.5, 0.3, 0.2];

/// Smooth estimation noise with certified bounds `|e(t)| <= bound` and `|e'(t)| <= rate_bound`.
///
/// Each axis is a sum of three sinusoids. The amplitudes on one axis add up to
/// `bound / sqrt(3)` and every angular frequency is at most `rate_bound / bound`, so each
/// axis stays within `bound / sqrt(3)` and its derivative within `rate_bound / sqrt(3)`.
/// Phases and the frequency spread come from the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedNoise {
    amplitude: [[f64; TERMS]; 3],
    omega: [[f64; TERMS]; 3],
    phase: [[f64; TERMS]; 3],
}

impl BoundedNoise {
    pub fn new(seed: u64, stream: u64, bound: f64, rate_bound: f64) -> Result<Self> {
        require_non_negative("bound", bound)?;
        require_non_negative("rate_bound", rate_bound)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);

        let per_axis = bound / 3f64.sqrt();
        let omega_max = if bound > 0.0 { rate_bound / bound } else { 0.0 };
        let mut noise = BoundedNoise::zero();
        for axis in 0..3 {
            for i in 0..TERMS {
                noise.amplitude[axis][i] = per_axis * WEIGHTS[i];
                noise.omega[axis][i] = omega_max * rng.random_range(0.35..=1.0);
                noise.phase[axis][i] = rng.random_range(0.0..TAU);
            }
        }
        Ok(noise)
    }

    pub fn zero() -> Self {
        BoundedNoise {
            amplitude: [[0.0; TERMS]; 3],
            omega: [[0.0; TERMS]; 3],
            phase: [[0.0; TERMS]; 3],
        }
    }

    pub fn value(&self, t: f64) -> Vec3 {
        let axis = |a: usize| {
            (0..TERMS)
                .map(|i| self.amplitude[a][i] * (self.omega[a][i] * t + self.phase[a][i]).sin())
                .sum::<f64>()
        };
        Vec3::new(axis(0), axis(1), axis(2))
    }

    pub fn rate(&self, t: f64) -> Vec3 {
        let axis = |a: usize| {
            (0..TERMS)
                .map(|i| {
                    self.amplitude[a][i]
                        * self.omega[a][i]
                        * (self.omega[a][i] * t + self.phase[a][i]).cos()
                })
                .sum::<f64>()
        };
        Vec3::new(axis(0), axis(1), axis(2))
    }
}

/// Noise sample at `t` for the generator identified by `seed` (stream 0).
pub fn bounded_noise(t: f64, seed: u64, bound: f64, rate_bound: f64) -> Result<Vec3> {
    Ok(BoundedNoise::new(seed, 0, bound, rate_bound)?.value(t))
}
