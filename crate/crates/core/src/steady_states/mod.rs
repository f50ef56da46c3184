//! Ground states of the energy-Casimir problems.
//!
//! A ground state is a function of the microscopic energy whose potential
//! reproduces itself. [`self_consistent_solve`] finds it by damped fixed-point
//! iteration on the potential, re-solving the multipliers at every step.

mod multipliers;
mod ode;
mod renormalize;

use crate::casimir::{CasimirFamily, CasimirSpec};
use crate::error::{HmfError, Result};
use crate::functionals::{casimir_integral, hamiltonian};
use crate::grid::{integrate, DistributionField, Potential};
use crate::interaction::solve_potential;

pub use multipliers::{
    casimir_constraint_g, discarded_tail_mass, gaussian_section, lambda_for_mu, mass_map, mu_from_moments,
    profile_moments, section_integral, solve_lambda_one, solve_multipliers, solve_multipliers_two,
    solve_multipliers_two_nested, ProfileMoments,
};
pub use ode::{ode_energy, ode_profile_solve, ode_rhs, OdeProfile};
pub use renormalize::{renormalization_gamma, renormalize_to_constraints};

/// `lambda`, and `mu < 0` for the two-constraint problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multipliers {
    pub lambda: f64,
    pub mu: Option<f64>,
}

/// Mass constraint `m1` and optional Casimir constraint `mj`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintSet {
    pub m1: f64,
    pub mj: Option<f64>,
}

impl ConstraintSet {
    pub fn one(m1: f64) -> Result<Self> {
        Self::new(m1, None)
    }

    pub fn two(m1: f64, mj: f64) -> Result<Self> {
        Self::new(m1, Some(mj))
    }

    pub fn new(m1: f64, mj: Option<f64>) -> Result<Self> {
        if !(m1 > 0.0 && m1.is_finite()) {
            return Err(HmfError::InvalidArgument(format!("m1 must be positive, got {m1}")));
        }
        if let Some(mj) = mj {
            if !(mj > 0.0 && mj.is_finite()) {
                return Err(HmfError::InvalidArgument(format!("mj must be positive, got {mj}")));
            }
        }
        Ok(Self { m1, mj })
    }
}

/// How velocity integrals of energy profiles are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VelocityQuadrature {
    /// Sums over the cell centers: sampled fields meet their constraints to
    /// rounding.
    #[default]
    Grid,
    /// Exact integrals over `[-v_max, v_max]` at each theta node.
    Analytic,
}

impl std::str::FromStr for VelocityQuadrature {
    type Err = HmfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "grid" => Ok(Self::Grid),
            "analytic" => Ok(Self::Analytic),
            other => Err(HmfError::InvalidArgument(format!("unknown quadrature {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub quadrature: VelocityQuadrature,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { damping: 0.5, tol: 1e-10, max_iter: 10_000, quadrature: VelocityQuadrature::Grid }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(HmfError::InvalidArgument(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) {
            return Err(HmfError::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub field: DistributionField,
    pub potential: Potential,
    pub multipliers: Multipliers,
    /// `sup |phi_{F^phi} - phi|` at the returned potential.
    pub fixed_point_residual: f64,
    /// Number of fixed-point evaluations.
    pub iterations: usize,
    pub discarded_tail_mass: f64,
}

/// Samples the energy profile with the given multipliers at every cell.
#[allow(non_snake_case)]
pub fn build_F_phi(phi: &Potential, spec: &CasimirSpec, m: &Multipliers) -> Result<DistributionField> {
    let grid = *phi.grid();
    let half_v2: Vec<f64> = grid.velocities().iter().map(|v| 0.5 * v * v).collect();
    let mut values = Vec::with_capacity(grid.len());
    match spec.family() {
        CasimirFamily::Entropy => {
            if m.mu.is_some() {
                return Err(HmfError::InvalidArgument("entropy states carry no mu".into()));
            }
            for &p in phi.values() {
                values.extend(half_v2.iter().map(|h| (m.lambda - p - h).exp()));
            }
        }
        CasimirFamily::Power(p) => {
            if let Some(mu) = m.mu {
                if !(mu < 0.0) {
                    return Err(HmfError::InvalidArgument(format!("mu must be negative, got {mu}")));
                }
            }
            let r = 1.0 / (p - 1.0);
            let c = multipliers::power_amplitude(p, m.mu);
            for &ph in phi.values() {
                values.extend(half_v2.iter().map(|h| {
                    let x = m.lambda - ph - h;
                    if x > 0.0 {
                        c * x.powf(r)
                    } else {
                        0.0
                    }
                }));
            }
        }
    }
    DistributionField::new(grid, values)
}

/// `F^phi` for the multipliers that meet `constraints` at this `phi`.
pub fn constrained_profile(
    phi: &Potential,
    spec: &CasimirSpec,
    constraints: &ConstraintSet,
    quad: VelocityQuadrature,
) -> Result<(DistributionField, Multipliers)> {
    let m = solve_multipliers(phi, spec, constraints, quad)?;
    Ok((build_F_phi(phi, spec, &m)?, m))
}

/// Damped fixed-point iteration `phi <- (1 - d) phi + d phi_{F^phi}`.
///
/// Stops once `sup |phi_{F^phi} - phi| <= tol` and returns that `phi` with
/// `F^phi`, translated so the potential minimum sits at `theta = pi`.
pub fn self_consistent_solve(
    spec: &CasimirSpec,
    constraints: &ConstraintSet,
    seed: &Potential,
    options: &SolverOptions,
) -> Result<SteadyStateResult> {
    options.validate()?;
    if constraints.mj.is_some() && !spec.h3() {
        return Err(HmfError::Unsupported(format!("{spec} with a Casimir constraint")));
    }
    let mut phi = seed.clone();
    let mut residual = f64::INFINITY;
    for k in 0..options.max_iter {
        let (field, m) = constrained_profile(&phi, spec, constraints, options.quadrature)?;
        let next = solve_potential(&field);
        residual = next.sup_distance(&phi);
        if residual <= options.tol {
            let n = phi.values().len();
            let shift = phi.argmin() as isize - (n / 2) as isize;
            let potential = phi.shift_theta_cells(shift);
            let field = field.shift_theta_cells(shift);
            let discarded = discarded_tail_mass(&potential, spec, &m);
            return Ok(SteadyStateResult {
                field,
                potential,
                multipliers: m,
                fixed_point_residual: residual,
                iterations: k + 1,
                discarded_tail_mass: discarded,
            });
        }
        if !residual.is_finite() {
            break;
        }
        phi = phi.blend(&next, options.damping);
    }
    Err(HmfError::NonConvergence { what: "self-consistent iteration", iterations: options.max_iter, residual })
}

/// `sup |f - F^{phi_f}|` with multipliers re-solved for `phi_f`.
pub fn euler_lagrange_residual(
    f: &DistributionField,
    spec: &CasimirSpec,
    constraints: &ConstraintSet,
    quad: VelocityQuadrature,
) -> Result<f64> {
    let phi = solve_potential(f);
    let (g, _) = constrained_profile(&phi, spec, constraints, quad)?;
    Ok(f.values().iter().zip(g.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Value of the auxiliary functional at `phi`, and the profile `F^phi` it is
/// attained at.
///
/// Two constraints: `\iint (v^2/2 + phi) F^phi + 1/2 \int phi'^2`.
/// One constraint: the same plus `\iint j(F^phi)`.
pub fn auxiliary_functional(
    phi: &Potential,
    spec: &CasimirSpec,
    constraints: &ConstraintSet,
    quad: VelocityQuadrature,
) -> Result<(f64, DistributionField)> {
    let (f, _) = constrained_profile(phi, spec, constraints, quad)?;
    let mut value = energy_pairing(&f, phi) + 0.5 * phi.gradient_norm_sq();
    if constraints.mj.is_none() {
        value += casimir_integral(&f, spec);
    }
    Ok((value, f))
}

/// `\iint (v^2/2 + phi) f`.
pub fn energy_pairing(f: &DistributionField, phi: &Potential) -> f64 {
    let g = f.grid();
    let half_v2: Vec<f64> = g.velocities().iter().map(|v| 0.5 * v * v).collect();
    let mut total = 0.0;
    for (row, &p) in f.values().chunks_exact(g.n_v()).zip(phi.values()) {
        total += row.iter().zip(&half_v2).map(|(x, h)| x * (h + p)).sum::<f64>();
    }
    total * g.cell_area()
}

/// `(H(F^{phi_f}), aux(phi_f), H(f))` together with
/// `aux(phi_f) - H(F^{phi_f})` and `1/2 ||phi'_{F} - phi_f'||^2`. For the
/// one-constraint problem `H` is replaced by `J = H + \iint j`.
#[derive(Clone, Copy, Debug)]
pub struct MonotoneChain {
    pub profile_value: f64,
    pub auxiliary: f64,
    pub field_value: f64,
    pub gap: f64,
    pub half_gradient_distance: f64,
}

pub fn monotone_chain(
    f: &DistributionField,
    spec: &CasimirSpec,
    constraints: &ConstraintSet,
    quad: VelocityQuadrature,
) -> Result<MonotoneChain> {
    let phi = solve_potential(f);
    let (aux, profile) = auxiliary_functional(&phi, spec, constraints, quad)?;
    let value = |g: &DistributionField| {
        let h = hamiltonian(g);
        if constraints.mj.is_none() {
            h + casimir_integral(g, spec)
        } else {
            h
        }
    };
    let phi_profile = solve_potential(&profile);
    let d2: f64 = phi_profile
        .derivative()
        .iter()
        .zip(phi.derivative())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        * phi.grid().d_theta();
    let profile_value = value(&profile);
    Ok(MonotoneChain {
        profile_value,
        auxiliary: aux,
        field_value: value(f),
        gap: aux - profile_value,
        half_gradient_distance: 0.5 * d2,
    })
}

/// Relative deviation of `f` from its constraints, the larger of the two.
pub fn constraint_defect(f: &DistributionField, spec: &CasimirSpec, constraints: &ConstraintSet) -> f64 {
    let dm = (integrate(f) - constraints.m1).abs() / constraints.m1;
    match constraints.mj {
        Some(mj) => dm.max((casimir_integral(f, spec) - mj).abs() / mj),
        None => dm,
    }
}
