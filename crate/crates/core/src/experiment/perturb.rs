//! Perturbations of a steady state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HmfError, Result};
use crate::grid::DistributionField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationKind {
    /// `f (1 + eta cos theta)`.
    DensityBump,
    /// `f(theta, v - eta)`.
    VelocityShift,
    /// `f u` with `u ~ U[1 - eta, 1 + eta]` per cell.
    RandomNoise,
}

impl std::str::FromStr for PerturbationKind {
    type Err = HmfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "density_bump" => Ok(Self::DensityBump),
            "velocity_shift" => Ok(Self::VelocityShift),
            "random_noise" => Ok(Self::RandomNoise),
            other => Err(HmfError::InvalidArgument(format!("unknown perturbation {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    /// Map back onto the steady state's constraints afterwards.
    pub renormalize: bool,
    pub seed: u64,
}

impl Perturbation {
    /// Negative values produced by large amplitudes are clipped to zero.
    pub fn apply(&self, f: &DistributionField) -> DistributionField {
        let grid = *f.grid();
        let eta = self.amplitude;
        let n_v = grid.n_v();
        let values: Vec<f64> = match self.kind {
            PerturbationKind::DensityBump => f
                .values()
                .iter()
                .enumerate()
                .map(|(k, &x)| (x * (1.0 + eta * grid.theta(k / n_v).cos())).max(0.0))
                .collect(),
            PerturbationKind::VelocityShift => {
                let mut out = Vec::with_capacity(grid.len());
                for i in 0..grid.n_theta() {
                    let row = f.row(i);
                    let at = |k: isize| if k >= 0 && (k as usize) < n_v { row[k as usize] } else { 0.0 };
                    let x0 = -eta / grid.d_v();
                    let k0 = x0.floor();
                    let a = x0 - k0;
                    for j in 0..n_v {
                        let k = j as isize + k0 as isize;
                        out.push(((1.0 - a) * at(k) + a * at(k + 1)).max(0.0));
                    }
                }
                out
            }
            PerturbationKind::RandomNoise => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                f.values()
                    .iter()
                    .map(|&x| {
                        let u: f64 = rng.random_range(-1.0..=1.0);
                        (x * (1.0 + eta * u)).max(0.0)
                    })
                    .collect()
            }
        };
        DistributionField::new(grid, values).expect("perturbations keep values finite and nonnegative")
    }
}
