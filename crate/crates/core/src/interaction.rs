//! Poisson interaction on the circle.
//!
//! The self-consistent potential solves `phi'' = rho - M / 2pi` with zero
//! mean, equivalently `phi = W * rho` for the periodic kernel
//! `W(theta) = -theta^2 / 4pi + |theta| / 2 - pi / 6` on `[-pi, pi]`.
//!
//! [`solve_potential`] convolves with the grid's band-limited Green function
//! (the Fourier series of `W` truncated to resolvable modes), which is exact
//! for trigonometric densities and keeps the discrete identity
//! `\int phi rho = -\int phi'^2` exact. [`solve_potential_direct`] convolves
//! with `W` and `W'` sampled at node differences and serves as the reference
//! route.

use std::f64::consts::PI;

use crate::grid::{DistributionField, PhaseGrid, Potential};
use crate::spectral;

/// Spatial density `rho(theta) = \int f dv` on the theta nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    grid: PhaseGrid,
    values: Vec<f64>,
}

impl Density {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `\int rho d theta`, equal to the mass of the originating field.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.d_theta()
    }
}

fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Periodic Poisson kernel.
pub fn kernel_w(theta: f64) -> f64 {
    let t = reduce_angle(theta);
    -t * t / (4.0 * PI) + t.abs() / 2.0 - PI / 6.0
}

/// Derivative of [`kernel_w`]; at the kink `theta = 0` it returns the mean of
/// the one-sided limits, 0.
pub fn kernel_w_prime(theta: f64) -> f64 {
    let t = reduce_angle(theta);
    let sign = if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    };
    -t / (2.0 * PI) + sign / 2.0
}

/// `sup |W'| = 1/2`.
pub const KERNEL_W_PRIME_SUP: f64 = 0.5;

pub fn density(f: &DistributionField) -> Density {
    let grid = *f.grid();
    let dv = grid.d_v();
    let values = (0..grid.n_theta()).map(|i| f.row(i).iter().sum::<f64>() * dv).collect();
    Density { grid, values }
}

pub fn potential_from_density(rho: &Density) -> Potential {
    let (values, derivative) = spectral::solve_poisson(&rho.values);
    Potential::from_parts(rho.grid, values, derivative)
}

pub fn solve_potential(f: &DistributionField) -> Potential {
    potential_from_density(&density(f))
}

/// `phi_i = sum_k W(theta_i - theta_k) rho_k d_theta`, O(n_theta^2).
pub fn solve_potential_direct(f: &DistributionField) -> Potential {
    let rho = density(f);
    let grid = *f.grid();
    let n = grid.n_theta();
    let dt = grid.d_theta();
    let w: Vec<f64> = (0..n).map(|m| kernel_w(grid.theta(m))).collect();
    let wp: Vec<f64> = (0..n).map(|m| kernel_w_prime(grid.theta(m))).collect();
    let mut values = vec![0.0; n];
    let mut derivative = vec![0.0; n];
    for i in 0..n {
        let (mut acc, mut dacc) = (0.0, 0.0);
        for k in 0..n {
            let m = (i + n - k) % n;
            acc += w[m] * rho.values[k];
            dacc += wp[m] * rho.values[k];
        }
        values[i] = acc * dt;
        derivative[i] = dacc * dt;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter_mut().for_each(|x| *x -= mean);
    Potential::from_parts(grid, values, derivative)
}

/// `max_i |D^2 phi_i - (rho_i - M / 2pi)|` with the centered second difference.
pub fn poisson_residual(phi: &Potential, rho: &Density) -> f64 {
    let n = phi.values().len();
    let h = phi.grid().d_theta();
    let mean_rho = rho.total() / (2.0 * PI);
    let p = phi.values();
    (0..n)
        .map(|i| {
            let d2 = (p[(i + 1) % n] - 2.0 * p[i] + p[(i + n - 1) % n]) / (h * h);
            (d2 - (rho.values[i] - mean_rho)).abs()
        })
        .fold(0.0, f64::max)
}
