#![allow(dead_code)]

use hmfp_core::{DistributionField, PhaseGrid, Potential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters of a sum of three drifting, modulated Maxwellians.
#[derive(Clone, Debug)]
pub struct Blob {
    amp: [f64; 3],
    depth: [f64; 3],
    phase: [f64; 3],
    mode: [f64; 3],
    drift: [f64; 3],
    temp: [f64; 3],
}

impl Blob {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut b = Blob { amp: [0.0; 3], depth: [0.0; 3], phase: [0.0; 3], mode: [1.0; 3], drift: [0.0; 3], temp: [1.0; 3] };
        for k in 0..3 {
            b.amp[k] = rng.random_range(0.2..1.0);
            b.depth[k] = rng.random_range(0.0..0.9);
            b.phase[k] = rng.random_range(0.0..std::f64::consts::TAU);
            b.mode[k] = rng.random_range(1..=3) as f64;
            b.drift[k] = rng.random_range(-1.0..1.0);
            b.temp[k] = rng.random_range(0.5..2.0);
        }
        b
    }

    pub fn eval(&self, theta: f64, v: f64) -> f64 {
        (0..3)
            .map(|k| {
                let w = v - self.drift[k];
                self.amp[k]
                    * (1.0 + self.depth[k] * (self.mode[k] * theta - self.phase[k]).cos())
                    * (-w * w / (2.0 * self.temp[k])).exp()
            })
            .sum()
    }

    pub fn sample(&self, grid: PhaseGrid) -> DistributionField {
        DistributionField::from_fn(grid, |t, v| self.eval(t, v)).unwrap()
    }
}

pub fn random_field(grid: PhaseGrid, rng: &mut ChaCha8Rng) -> DistributionField {
    Blob::random(rng).sample(grid)
}

/// A field with flat plateaus and exact zeros, which stresses tie handling.
pub fn random_steppy_field(grid: PhaseGrid, rng: &mut ChaCha8Rng) -> DistributionField {
    let levels: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
    let cut = rng.random_range(1.0..3.0);
    DistributionField::from_fn(grid, |t, v| {
        if v.abs() > cut {
            0.0
        } else {
            levels[((t / std::f64::consts::TAU * 4.0) as usize).min(3)] * (1.0 + (v.abs() < 0.5 * cut) as u8 as f64)
        }
    })
    .unwrap()
}

pub fn random_potential(grid: PhaseGrid, rng: &mut ChaCha8Rng) -> Potential {
    let a: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    Potential::from_fn(grid, |t| (0..3).map(|k| a[k] * ((k + 1) as f64 * t).cos() + b[k] * ((k + 1) as f64 * t).sin()).sum())
        .unwrap()
}
