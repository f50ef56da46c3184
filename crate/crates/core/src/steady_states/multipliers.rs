//! Lagrange multipliers of the energy-Casimir ground states.
//!
//! Every state built here is a function of the microscopic energy
//! `e = v^2/2 + phi(theta)`:
//!
//! * entropy: `F = exp(lambda - e)`;
//! * power `j(t) = t^p`: `F = c (lambda - e)_+^r` with `r = 1/(p-1)` and
//!   `c = (p |mu|)^{-r}`, where the one-constraint problem uses `|mu| = 1`.
//!
//! Moments are taken either as discrete sums over the cell centers
//! ([`VelocityQuadrature::Grid`]) or with exact velocity integrals over
//! `[-v_max, v_max]` at each theta node ([`VelocityQuadrature::Analytic`]).

use std::f64::consts::PI;

use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erf;

use crate::casimir::{CasimirFamily, CasimirSpec};
use crate::error::{HmfError, Result};
use crate::grid::Potential;

use super::{ConstraintSet, Multipliers, VelocityQuadrature};

pub(crate) const BISECTION_CAP: usize = 200;
const CONSTRAINT_RTOL: f64 = 1e-10;

/// `\int_{|v| < min(sqrt(2A), L)} v^{2m} (A - v^2/2)^s dv`, zero for `A <= 0`.
pub fn section_integral(m: u32, s: f64, a: f64, l: f64) -> f64 {
    if !(a > 0.0) {
        return 0.0;
    }
    let m = m as f64;
    let (pa, pb) = (m + 0.5, s + 1.0);
    let u = (l * l / (2.0 * a)).min(1.0);
    let frac = if u >= 1.0 { 1.0 } else { beta_reg(pa, pb, u) };
    (2.0 * a).powf(m) * a.powf(s) * (2.0 * a).sqrt() * ln_beta(pa, pb).exp() * frac
}

#[inline]
fn pos_pow(x: f64, s: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if s == 1.0 {
        x
    } else if s == 2.0 {
        x * x
    } else {
        x.powf(s)
    }
}

/// Energy layout of one potential under a chosen velocity quadrature.
pub(crate) struct EnergyQuadrature<'a> {
    phi: &'a [f64],
    half_v2: Vec<f64>,
    d_theta: f64,
    d_v: f64,
    v_max: f64,
    kind: VelocityQuadrature,
}

impl<'a> EnergyQuadrature<'a> {
    pub(crate) fn new(phi: &'a Potential, kind: VelocityQuadrature) -> Self {
        let g = phi.grid();
        Self {
            phi: phi.values(),
            half_v2: g.velocities().iter().map(|v| 0.5 * v * v).collect(),
            d_theta: g.d_theta(),
            d_v: g.d_v(),
            v_max: g.v_max(),
            kind,
        }
    }

    pub(crate) fn min_energy(&self) -> f64 {
        let pmin = self.phi.iter().copied().fold(f64::INFINITY, f64::min);
        match self.kind {
            VelocityQuadrature::Analytic => pmin,
            VelocityQuadrature::Grid => pmin + self.half_v2.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// `\iint (lambda - e)_+^s`.
    pub(crate) fn power_sum(&self, lambda: f64, s: f64) -> f64 {
        self.power_moment(lambda, s, 0)
    }

    /// `\iint v^{2m} (lambda - e)_+^s`.
    pub(crate) fn power_moment(&self, lambda: f64, s: f64, m: u32) -> f64 {
        match self.kind {
            VelocityQuadrature::Analytic => {
                self.phi.iter().map(|&p| section_integral(m, s, lambda - p, self.v_max)).sum::<f64>() * self.d_theta
            }
            VelocityQuadrature::Grid => {
                let mut total = 0.0;
                for &p in self.phi {
                    let top = lambda - p;
                    for &h in &self.half_v2 {
                        let x = top - h;
                        if x > 0.0 {
                            total += pos_pow(x, s) * (2.0 * h).powi(m as i32);
                        }
                    }
                }
                total * self.d_theta * self.d_v
            }
        }
    }

    /// `ln \iint exp(-e)`.
    pub(crate) fn log_gibbs_sum(&self) -> f64 {
        let e0 = self.min_energy();
        let s = match self.kind {
            VelocityQuadrature::Analytic => {
                let g0 = gaussian_section(self.v_max).0;
                self.phi.iter().map(|&p| (e0 - p).exp()).sum::<f64>() * g0 * self.d_theta
            }
            VelocityQuadrature::Grid => {
                let mut total = 0.0;
                for &p in self.phi {
                    for &h in &self.half_v2 {
                        total += (e0 - p - h).exp();
                    }
                }
                total * self.d_theta * self.d_v
            }
        };
        s.ln() - e0
    }

    /// `(\iint exp(-e), \iint v^2 exp(-e), \iint (-phi) exp(-e))` under this quadrature.
    fn gibbs_moments(&self) -> (f64, f64, f64) {
        let (mut m0, mut m2, mut mp) = (0.0, 0.0, 0.0);
        match self.kind {
            VelocityQuadrature::Analytic => {
                let (g0, g2) = gaussian_section(self.v_max);
                for &p in self.phi {
                    let w = (-p).exp();
                    m0 += w * g0;
                    m2 += w * g2;
                    mp -= p * w * g0;
                }
                (m0 * self.d_theta, m2 * self.d_theta, mp * self.d_theta)
            }
            VelocityQuadrature::Grid => {
                for &p in self.phi {
                    for &h in &self.half_v2 {
                        let w = (-p - h).exp();
                        m0 += w;
                        m2 += 2.0 * h * w;
                        mp -= p * w;
                    }
                }
                let a = self.d_theta * self.d_v;
                (m0 * a, m2 * a, mp * a)
            }
        }
    }
}

/// `(\int_{-L}^{L} e^{-v^2/2}, \int_{-L}^{L} v^2 e^{-v^2/2})`.
pub fn gaussian_section(l: f64) -> (f64, f64) {
    let g0 = (2.0 * PI).sqrt() * erf(l / 2f64.sqrt());
    (g0, g0 - 2.0 * l * (-0.5 * l * l).exp())
}

fn power_exponent(spec: &CasimirSpec) -> Option<(f64, f64)> {
    match spec.family() {
        CasimirFamily::Power(p) => Some((p, 1.0 / (p - 1.0))),
        CasimirFamily::Entropy => None,
    }
}

/// Amplitude `c = (p |mu|)^{-r}` of the power profile.
pub(crate) fn power_amplitude(p: f64, mu: Option<f64>) -> f64 {
    let r = 1.0 / (p - 1.0);
    (p * mu.map_or(1.0, f64::abs)).powf(-r)
}

/// Smallest `x` in `(lo, hi]` with `g(x) >= 0`, for nondecreasing `g` with
/// `g(lo) < 0 <= g(hi)`.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Doubles the bracket width above `lo` until `g(hi) >= 0`.
pub(crate) fn grow_bracket(lo: f64, g: impl Fn(f64) -> f64, what: &'static str) -> Result<f64> {
    let mut width = 1.0;
    for _ in 0..BISECTION_CAP {
        let hi = lo + width;
        if g(hi) >= 0.0 {
            return Ok(hi);
        }
        width *= 2.0;
    }
    Err(HmfError::BracketFailure(what))
}

fn check_relative(what: &'static str, got: f64, want: f64) -> Result<()> {
    let residual = (got - want).abs() / want.abs();
    if residual <= CONSTRAINT_RTOL {
        Ok(())
    } else {
        Err(HmfError::NonConvergence { what, iterations: BISECTION_CAP, residual })
    }
}

/// Mass `\iint F` of the state with the given multipliers.
pub fn mass_map(phi: &Potential, spec: &CasimirSpec, m: &Multipliers, quad: VelocityQuadrature) -> f64 {
    let eq = EnergyQuadrature::new(phi, quad);
    match power_exponent(spec) {
        Some((p, r)) => power_amplitude(p, m.mu) * eq.power_sum(m.lambda, r),
        None => (m.lambda + eq.log_gibbs_sum()).exp(),
    }
}

/// `lambda` with `\iint F = m1` for the one-constraint profile.
pub fn solve_lambda_one(phi: &Potential, spec: &CasimirSpec, m1: f64, quad: VelocityQuadrature) -> Result<f64> {
    if !(m1 > 0.0) {
        return Err(HmfError::InvalidArgument(format!("mass must be positive, got {m1}")));
    }
    let eq = EnergyQuadrature::new(phi, quad);
    match power_exponent(spec) {
        None => Ok(m1.ln() - eq.log_gibbs_sum()),
        Some((p, r)) => lambda_for_amplitude(&eq, power_amplitude(p, None), r, m1),
    }
}

fn lambda_for_amplitude_unchecked(eq: &EnergyQuadrature, c: f64, r: f64, m1: f64) -> Result<f64> {
    let lo = eq.min_energy();
    let deficit = |l: f64| c * eq.power_sum(l, r) - m1;
    let hi = grow_bracket(lo, deficit, "mass map")?;
    Ok(bisect(lo, hi, deficit))
}

fn lambda_for_amplitude(eq: &EnergyQuadrature, c: f64, r: f64, m1: f64) -> Result<f64> {
    let lambda = lambda_for_amplitude_unchecked(eq, c, r, m1)?;
    check_relative("mass constraint", c * eq.power_sum(lambda, r), m1)?;
    Ok(lambda)
}

/// `lambda(mu)`: the mass-matching `lambda` at fixed `mu < 0`.
pub fn lambda_for_mu(phi: &Potential, spec: &CasimirSpec, m1: f64, mu: f64, quad: VelocityQuadrature) -> Result<f64> {
    let (p, r) = power_exponent(spec).ok_or_else(|| HmfError::Unsupported(spec.to_string()))?;
    if !(mu < 0.0) {
        return Err(HmfError::InvalidArgument(format!("mu must be negative, got {mu}")));
    }
    lambda_for_amplitude(&EnergyQuadrature::new(phi, quad), power_amplitude(p, Some(mu)), r, m1)
}

/// `G(mu) = \iint j(F)` along the mass-matching curve `lambda(mu)`.
pub fn casimir_constraint_g(phi: &Potential, spec: &CasimirSpec, m1: f64, mu: f64, quad: VelocityQuadrature) -> Result<f64> {
    let lambda = lambda_for_mu(phi, spec, m1, mu, quad)?;
    let (p, r) = power_exponent(spec).expect("checked by lambda_for_mu");
    let eq = EnergyQuadrature::new(phi, quad);
    Ok(power_amplitude(p, Some(mu)).powf(p) * eq.power_sum(lambda, r + 1.0))
}

/// Pair `(lambda, mu)` matching mass `m1` and Casimir `mj`.
///
/// With `c = m1 / K_r(lambda)` the Casimir constraint reduces to
/// `K_{r+1}(lambda) / K_r(lambda)^p = mj / m1^p`, whose left side decreases
/// strictly in `lambda`; a single bisection therefore suffices.
pub fn solve_multipliers_two(phi: &Potential, spec: &CasimirSpec, constraints: &ConstraintSet, quad: VelocityQuadrature) -> Result<Multipliers> {
    if !spec.h3() {
        return Err(HmfError::Unsupported(format!("{spec}: the two-constraint problem needs (p, q) growth bounds")));
    }
    let (p, r) = power_exponent(spec).expect("h3 implies power family");
    let m1 = constraints.m1;
    let mj = constraints
        .mj
        .ok_or_else(|| HmfError::InvalidArgument("two-constraint solve needs a Casimir constraint".into()))?;
    let eq = EnergyQuadrature::new(phi, quad);
    let target = mj.ln() - p * m1.ln();
    // decreasing in lambda, so solve on its negation
    let gap = |l: f64| {
        let k1 = eq.power_sum(l, r);
        if k1 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        target - (eq.power_sum(l, r + 1.0).ln() - p * k1.ln())
    };
    let lo = eq.min_energy();
    let hi = grow_bracket(lo, gap, "Casimir ratio")?;
    let lambda = bisect(lo, hi, gap);
    let c = m1 / eq.power_sum(lambda, r);
    let mu = -c.powf(-(p - 1.0)) / p;
    check_relative("Casimir constraint", c.powf(p) * eq.power_sum(lambda, r + 1.0), mj)?;
    Ok(Multipliers { lambda, mu: Some(mu) })
}

/// Reference two-constraint solve: bisection on `mu` over the increasing map
/// `G`, with an inner mass bisection for `lambda(mu)` at each trial.
pub fn solve_multipliers_two_nested(
    phi: &Potential,
    spec: &CasimirSpec,
    constraints: &ConstraintSet,
    quad: VelocityQuadrature,
) -> Result<Multipliers> {
    let mj = constraints
        .mj
        .ok_or_else(|| HmfError::InvalidArgument("two-constraint solve needs a Casimir constraint".into()))?;
    let m1 = constraints.m1;
    let (p, r) = power_exponent(spec).ok_or_else(|| HmfError::Unsupported(spec.to_string()))?;
    let eq = EnergyQuadrature::new(phi, quad);
    // trial mu far from the root put lambda against min e, where the mass
    // cannot be matched to full relative precision; only the final lambda is checked
    let g = |t: f64| -> Result<f64> {
        let c = power_amplitude(p, Some(-t.exp()));
        let lambda = lambda_for_amplitude_unchecked(&eq, c, r, m1)?;
        Ok(c.powf(p) * eq.power_sum(lambda, r + 1.0) - mj)
    };
    // t = ln|mu|; G decreases in |mu|
    let (mut lo, mut hi) = (-1e-6f64.ln().abs(), 0.0);
    for _ in 0..BISECTION_CAP {
        if g(lo)? > 0.0 {
            break;
        }
        lo -= 2.0 * (hi - lo).abs().max(1.0);
    }
    for _ in 0..BISECTION_CAP {
        if g(hi)? < 0.0 {
            break;
        }
        hi += 2.0 * (hi - lo).abs().max(1.0);
    }
    if g(lo)? <= 0.0 || g(hi)? >= 0.0 {
        return Err(HmfError::BracketFailure("G(mu)"));
    }
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = -(0.5 * (lo + hi)).exp();
    Ok(Multipliers { lambda: lambda_for_mu(phi, spec, m1, mu, quad)?, mu: Some(mu) })
}

/// Multipliers for either constraint set.
pub fn solve_multipliers(phi: &Potential, spec: &CasimirSpec, constraints: &ConstraintSet, quad: VelocityQuadrature) -> Result<Multipliers> {
    match constraints.mj {
        None => Ok(Multipliers { lambda: solve_lambda_one(phi, spec, constraints.m1, quad)?, mu: None }),
        Some(_) => solve_multipliers_two(phi, spec, constraints, quad),
    }
}

/// Moments of an energy profile `F^phi`, computed under a chosen quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileMoments {
    /// `\iint F`.
    pub mass: f64,
    /// `\iint v^2 F`.
    pub second_moment: f64,
    /// `\iint j(F)`.
    pub casimir: f64,
    /// `\iint F j'(F)`.
    pub f_j_prime: f64,
}

pub fn profile_moments(phi: &Potential, spec: &CasimirSpec, m: &Multipliers, quad: VelocityQuadrature) -> ProfileMoments {
    let eq = EnergyQuadrature::new(phi, quad);
    match power_exponent(spec) {
        Some((p, r)) => {
            let c = power_amplitude(p, m.mu);
            let casimir = c.powf(p) * eq.power_sum(m.lambda, r + 1.0);
            ProfileMoments {
                mass: c * eq.power_sum(m.lambda, r),
                second_moment: c * eq.power_moment(m.lambda, r, 1),
                casimir,
                f_j_prime: p * casimir,
            }
        }
        None => {
            let (m0, m2, mp) = eq.gibbs_moments();
            let scale = m.lambda.exp();
            let mass = scale * m0;
            // f ln f = f (lambda - phi - v^2/2)
            let casimir = scale * (m.lambda * m0 + mp - 0.5 * m2);
            ProfileMoments { mass, second_moment: scale * m2, casimir, f_j_prime: casimir + mass }
        }
    }
}

/// `-\iint v^2 F / (\iint F j'(F) - \iint j(F))`, the value `mu` must take at
/// a two-constraint critical point.
pub fn mu_from_moments(m: &ProfileMoments) -> f64 {
    -m.second_moment / (m.f_j_prime - m.casimir)
}

/// Mass the profile would carry outside `[-v_max, v_max]`.
pub fn discarded_tail_mass(phi: &Potential, spec: &CasimirSpec, m: &Multipliers) -> f64 {
    let d_theta = phi.grid().d_theta();
    let l = phi.grid().v_max();
    match power_exponent(spec) {
        Some((p, r)) => {
            let c = power_amplitude(p, m.mu);
            phi.values()
                .iter()
                .map(|&ph| {
                    let a = m.lambda - ph;
                    section_integral(0, r, a, f64::INFINITY) - section_integral(0, r, a, l)
                })
                .sum::<f64>()
                * c
                * d_theta
        }
        None => {
            let tail = (2.0 * PI).sqrt() * statrs::function::erf::erfc(l / 2f64.sqrt());
            phi.values().iter().map(|&ph| (m.lambda - ph).exp()).sum::<f64>() * tail * d_theta
        }
    }
}
