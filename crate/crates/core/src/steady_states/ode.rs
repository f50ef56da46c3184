//! Shooting characterization of one-constraint profiles.
//!
//! Writing `Psi = phi - lambda`, a one-constraint ground state solves
//! `Psi'' = G(Psi)` with `G(e) = \int G(v^2/2 + e) dv - M / 2pi`, where
//! `G(t) = (j')^{-1}((-t)_+)` or `exp(-t)`.

use std::f64::consts::PI;

use crate::casimir::{CasimirFamily, CasimirSpec};
use crate::error::{HmfError, Result};
use crate::grid::{PhaseGrid, Potential};

use super::multipliers::section_integral;

const BLOW_UP: f64 = 1e8;

/// Right-hand side `G(e)`.
pub fn ode_rhs(spec: &CasimirSpec, m1: f64, e: f64) -> f64 {
    let density = match spec.family() {
        CasimirFamily::Entropy => (2.0 * PI).sqrt() * (-e).exp(),
        CasimirFamily::Power(p) => {
            let r = 1.0 / (p - 1.0);
            p.powf(-r) * section_integral(0, r, -e, f64::INFINITY)
        }
    };
    density - m1 / (2.0 * PI)
}

/// First integral `1/2 Psi'^2 - P(Psi)` with `P' = G`.
pub fn ode_energy(spec: &CasimirSpec, m1: f64, psi: f64, dpsi: f64) -> f64 {
    let primitive = match spec.family() {
        CasimirFamily::Entropy => -(2.0 * PI).sqrt() * (-psi).exp(),
        CasimirFamily::Power(p) => {
            let r = 1.0 / (p - 1.0);
            -p.powf(-r) * section_integral(0, r + 1.0, -psi, f64::INFINITY) / (r + 1.0)
        }
    } - m1 * psi / (2.0 * PI);
    0.5 * dpsi * dpsi - primitive
}

#[derive(Clone, Debug)]
pub struct OdeProfile {
    /// `Psi` at the theta nodes.
    pub psi: Vec<f64>,
    /// `Psi` recentred to zero mean.
    pub potential: Potential,
    /// `|Psi(anchor + 2pi) - Psi(anchor)| + |Psi'(anchor + 2pi) - Psi'(anchor)|`.
    pub periodicity_defect: f64,
    /// Largest deviation of the first integral from its initial value.
    pub energy_drift: f64,
}

/// Integrates `Psi'' = G(Psi)` with RK4 from `(Psi, Psi') = (psi_min, 0)` at
/// `theta_anchor` (snapped to the nearest node) over one period, using
/// `substeps` steps per grid cell.
pub fn ode_profile_solve(
    spec: &CasimirSpec,
    m1: f64,
    psi_min: f64,
    theta_anchor: f64,
    grid: &PhaseGrid,
    substeps: usize,
) -> Result<OdeProfile> {
    if !(m1 > 0.0) || !psi_min.is_finite() || substeps == 0 {
        return Err(HmfError::InvalidArgument("need m1 > 0, finite psi_min and substeps >= 1".into()));
    }
    let n = grid.n_theta();
    let dt = grid.d_theta();
    let h = dt / substeps as f64;
    let start = (theta_anchor / dt).round().rem_euclid(n as f64) as usize % n;
    let rhs = |y: [f64; 2]| [y[1], ode_rhs(spec, m1, y[0])];
    let e0 = ode_energy(spec, m1, psi_min, 0.0);
    let mut y = [psi_min, 0.0];
    let mut psi = vec![0.0; n];
    let mut drift: f64 = 0.0;
    for m in 0..n {
        psi[(start + m) % n] = y[0];
        for s in 0..substeps {
            let k1 = rhs(y);
            let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
            for c in 0..2 {
                y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            if !(y[0].abs() < BLOW_UP && y[1].abs() < BLOW_UP) {
                let theta = grid.theta(start) + (m * substeps + s + 1) as f64 * h;
                return Err(HmfError::BlowUp { theta });
            }
        }
        drift = drift.max((ode_energy(spec, m1, y[0], y[1]) - e0).abs());
    }
    let periodicity_defect = (y[0] - psi_min).abs() + y[1].abs();
    let potential = Potential::from_values(*grid, &psi)?;
    Ok(OdeProfile { psi, potential, periodicity_defect, energy_drift: drift })
}
