//! Distribution functions, decreasing rearrangements and rearrangement with
//! respect to the microscopic energy `e = v^2/2 + phi(theta)`.
//!
//! On the grid every cell carries the same measure `w = d_theta d_v`, so the
//! decreasing rearrangement `f^#` is the sorted list of cell values laid out
//! on steps of width `w`, and the energy measure `a_phi` is the count of
//! cells below a given energy. Composing the two assigns the largest values
//! to the lowest-energy cells. Cells whose energies coincide (up to a relative
//! `1e-12`) form one level set and share the average of their values, which
//! keeps `f^{*phi}` a function of the energy alone.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{HmfError, Result};
use crate::grid::{integrate, DistributionField, PhaseGrid, Potential};
use crate::interaction::solve_potential;
use crate::functionals::hamiltonian;
use crate::steady_states::energy_pairing;

const TIE_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// `value[k]` on `[b_k, b_{k+1})`.
    RightStep,
    /// Linear between breakpoints, constant beyond the ends.
    Linear,
}

/// Nonincreasing function sampled at increasing breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    rule: StepRule,
}

impl MonotoneProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, rule: StepRule) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(HmfError::InvalidArgument("profile needs matching, nonempty breakpoints and values".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HmfError::InvalidArgument("breakpoints must increase strictly".into()));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(HmfError::InvalidArgument("profile values must not increase".into()));
        }
        Ok(Self { breakpoints, values, rule })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rule(&self) -> StepRule {
        self.rule
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        let k = b.partition_point(|&t| t <= x);
        if k == 0 {
            return self.values[0];
        }
        let k = k - 1;
        match self.rule {
            StepRule::RightStep => self.values[k],
            StepRule::Linear => {
                if k + 1 == b.len() {
                    self.values[k]
                } else {
                    let a = (x - b[k]) / (b[k + 1] - b[k]);
                    (1.0 - a) * self.values[k] + a * self.values[k + 1]
                }
            }
        }
    }

    /// Two-column CSV `breakpoint,value` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("breakpoint,value\n");
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            writeln!(s, "{b},{v}").unwrap();
        }
        s
    }

    pub fn from_csv(text: &str, rule: StepRule) -> Result<Self> {
        let mut b = Vec::new();
        let mut v = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let mut cols = line.split(',');
            let mut next = || -> Result<f64> {
                cols.next()
                    .and_then(|c| c.trim().parse().ok())
                    .ok_or_else(|| HmfError::InvalidArgument(format!("bad profile row {line:?}")))
            };
            b.push(next()?);
            v.push(next()?);
        }
        Self::new(b, v, rule)
    }
}

fn sorted_values(f: &DistributionField) -> Vec<f64> {
    let mut v = f.values().to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `mu_f(s) = |{f > s}|` at each level.
pub fn distribution_function(f: &DistributionField, levels: &[f64]) -> Result<MonotoneProfile> {
    if levels.iter().any(|&s| s < 0.0) {
        return Err(HmfError::InvalidArgument("levels must be nonnegative".into()));
    }
    let sorted = sorted_values(f);
    let w = f.grid().cell_area();
    let values = levels
        .iter()
        .map(|&s| (sorted.len() - sorted.partition_point(|&x| x <= s)) as f64 * w)
        .collect();
    MonotoneProfile::new(levels.to_vec(), values, StepRule::RightStep)
}

/// `f^#(s) = sup{t : mu(t) > s}` for a right-step distribution function.
/// The supremum is capped at the last sampled level.
pub fn pseudo_inverse(mu: &MonotoneProfile) -> Result<MonotoneProfile> {
    let t = mu.breakpoints();
    let m = mu.values();
    let mut s: Vec<f64> = m.iter().copied().chain(std::iter::once(0.0)).collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    let values = s
        .iter()
        .map(|&sb| {
            // mu is nonincreasing, so {k : m_k > sb} is a prefix
            let count = m.partition_point(|&x| x > sb);
            match count {
                0 => 0.0,
                c if c == t.len() => t[c - 1],
                c => t[c],
            }
        })
        .collect();
    MonotoneProfile::new(s, values, StepRule::RightStep)
}

/// The decreasing rearrangement `f^#` as a right-step profile with steps of
/// one cell measure.
pub fn decreasing_profile(f: &DistributionField) -> MonotoneProfile {
    let mut v = sorted_values(f);
    v.reverse();
    let w = f.grid().cell_area();
    let n = v.len();
    let breakpoints = (0..=n).map(|k| k as f64 * w).collect();
    v.push(0.0);
    MonotoneProfile::new(breakpoints, v, StepRule::RightStep).expect("sorted values form a monotone profile")
}

/// `a_phi(e) = |{v^2/2 + phi < e}|` with exact velocity sections.
pub fn sublevel_measure_a(phi: &Potential, e: f64) -> f64 {
    phi.values()
        .iter()
        .map(|&p| {
            let d = e - p;
            if d > 0.0 {
                2.0 * (2.0 * d).sqrt()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        * phi.grid().d_theta()
}

/// `a_phi^{-1}(s)`, the energy whose sublevel set has measure `s`.
pub fn a_inverse(phi: &Potential, s: f64) -> f64 {
    if s <= 0.0 {
        return phi.min();
    }
    let base = s * s / (32.0 * PI * PI);
    let (mut lo, mut hi) = (base + phi.min(), base + phi.max());
    if sublevel_measure_a(phi, lo) >= s {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sublevel_measure_a(phi, mid) >= s {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Samples of `a_phi` on an increasing energy grid.
#[derive(Clone, Debug)]
pub struct EnergyMeasure {
    pub potential: Potential,
    pub energies: Vec<f64>,
    pub a_values: Vec<f64>,
}

impl EnergyMeasure {
    pub fn new(potential: &Potential, energies: Vec<f64>) -> Result<Self> {
        if energies.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HmfError::InvalidArgument("energies must increase strictly".into()));
        }
        let a_values = energies.iter().map(|&e| sublevel_measure_a(potential, e)).collect();
        Ok(Self { potential: potential.clone(), energies, a_values })
    }

    /// Largest violation of `s^2/32pi^2 + min phi <= a^{-1}(s) <= s^2/32pi^2 + max phi`
    /// over the sampled `s = a(e)`; zero or negative when the bounds hold.
    pub fn bound_violation(&self) -> f64 {
        let (lo, hi) = (self.potential.min(), self.potential.max());
        let mut worst = f64::NEG_INFINITY;
        for (&e, &s) in self.energies.iter().zip(&self.a_values) {
            if s <= 0.0 {
                continue;
            }
            let base = s * s / (32.0 * PI * PI);
            let tol = 1e-12 * (1.0 + e.abs());
            worst = worst.max(base + lo - e - tol).max(e - (base + hi) - tol);
        }
        worst
    }
}

fn check_potential(f: &DistributionField, phi: &Potential) -> Result<()> {
    if phi.grid().n_theta() != f.grid().n_theta() {
        return Err(HmfError::GridMismatch);
    }
    Ok(())
}

/// Cell indices sorted by energy, grouped into level sets.
fn energy_levels(grid: &PhaseGrid, phi: &Potential) -> (Vec<usize>, Vec<f64>, Vec<(usize, usize)>) {
    let n_v = grid.n_v();
    let half_v2: Vec<f64> = grid.velocities().iter().map(|v| 0.5 * v * v).collect();
    let energy: Vec<f64> = (0..grid.len()).map(|k| phi.values()[k / n_v] + half_v2[k % n_v]).collect();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| energy[a].total_cmp(&energy[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&k| energy[k]).collect();
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[start] > TIE_RTOL * sorted[start].abs().max(1.0) {
            blocks.push((start, k));
            start = k;
        }
    }
    (order, sorted, blocks)
}

/// `f^{*phi} = f^# o a_phi(v^2/2 + phi)`: equimeasurable to `f` and
/// nonincreasing along the energy.
pub fn rearrange_with_energy(f: &DistributionField, phi: &Potential) -> Result<DistributionField> {
    check_potential(f, phi)?;
    let grid = *f.grid();
    let (order, _, blocks) = energy_levels(&grid, phi);
    let mut desc = sorted_values(f);
    desc.reverse();
    let mut out = vec![0.0; grid.len()];
    for (a, b) in blocks {
        let avg = desc[a..b].iter().sum::<f64>() / (b - a) as f64;
        for &k in &order[a..b] {
            out[k] = avg;
        }
    }
    Ok(DistributionField::from_raw(grid, out))
}

/// Rearrangement with `phi = 0`: symmetric decreasing in `v`, independent of
/// `theta`.
pub fn symmetric_rearrangement(f: &DistributionField) -> DistributionField {
    rearrange_with_energy(f, &Potential::zero(*f.grid())).expect("zero potential matches its grid")
}

/// `sup_s |mu_f(s) - mu_g(s)|`, evaluated exactly at every jump.
pub fn equimeasurability_defect(f: &DistributionField, g: &DistributionField) -> Result<f64> {
    f.same_grid(g)?;
    let (a, b) = (sorted_values(f), sorted_values(g));
    let w = f.grid().cell_area();
    let above = |v: &[f64], s: f64| (v.len() - v.partition_point(|&x| x <= s)) as f64;
    let mut worst: f64 = 0.0;
    for &s in a.iter().chain(&b) {
        worst = worst.max((above(&a, s) - above(&b, s)).abs());
    }
    Ok(worst * w)
}

/// Both sides of `\iint (v^2/2 + phi) f^{*phi} = \int a^{-1}(s) f^#(s) ds`,
/// with `a^{-1}` taken from the cell measure of the energy.
pub fn energy_identity_sides(f: &DistributionField, phi: &Potential) -> Result<(f64, f64)> {
    let lhs = energy_pairing(&rearrange_with_energy(f, phi)?, phi);
    let (_, sorted_e, _) = energy_levels(f.grid(), phi);
    let w = f.grid().cell_area();
    let n = sorted_e.len();
    let breakpoints: Vec<f64> = (0..=n).map(|k| k as f64 * w).collect();
    let sharp = decreasing_profile(f);
    // a^{-1} is nondecreasing, so integrate the product over the common steps
    let mut rhs = 0.0;
    for k in 0..n {
        let mid = 0.5 * (breakpoints[k] + breakpoints[k + 1]);
        rhs += sorted_e[k] * sharp.eval(mid) * w;
    }
    Ok((lhs, rhs))
}

/// `beta_{f,g}(t) = |{f <= t < g}|`.
pub fn beta_overlap(f: &DistributionField, g: &DistributionField, t: f64) -> Result<f64> {
    f.same_grid(g)?;
    let count = f.values().iter().zip(g.values()).filter(|(&a, &b)| a <= t && t < b).count();
    Ok(count as f64 * f.grid().cell_area())
}

/// `\int_0^inf beta_{f,g}(t) dt`, exact for the piecewise-constant `beta`.
pub fn beta_integral(f: &DistributionField, g: &DistributionField) -> Result<f64> {
    f.same_grid(g)?;
    let mut knots: Vec<f64> = f.values().iter().chain(g.values()).copied().chain(std::iter::once(0.0)).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut total = 0.0;
    for win in knots.windows(2) {
        total += beta_overlap(f, g, win[0])? * (win[1] - win[0]);
    }
    Ok(total)
}

/// Faster equivalent of [`beta_integral`]: `\iint (g - f)_+`.
pub fn beta_integral_direct(f: &DistributionField, g: &DistributionField) -> Result<f64> {
    f.same_grid(g)?;
    Ok(f.values().iter().zip(g.values()).map(|(a, b)| (b - a).max(0.0)).sum::<f64>() * f.grid().cell_area())
}

/// `B_phi(mu) = \iint_{a_phi(e) < mu} e`.
#[allow(non_snake_case)]
pub fn convex_B(phi: &Potential, mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let e_star = a_inverse(phi, mu);
    phi.values()
        .iter()
        .map(|&p| {
            let c = (2.0 * (e_star - p).max(0.0)).sqrt();
            c * c * c / 3.0 + 2.0 * c * p
        })
        .sum::<f64>()
        * phi.grid().d_theta()
}

#[derive(Clone, Debug)]
pub struct EquimeasurableResult {
    pub field: DistributionField,
    pub potential: Potential,
    /// `sup |phi_{f0^{*phi}} - phi|` at the returned potential.
    pub fixed_point_residual: f64,
    /// Number of potential updates performed.
    pub iterations: usize,
    /// `H(f0^{*phi_k})` for every visited potential.
    pub hamiltonian_history: Vec<f64>,
}

/// Damped iteration `phi <- (1 - d) phi + d phi_{f0^{*phi}}`, started at
/// `phi_{f0}`. Every iterate is equimeasurable to `f0`.
pub fn equimeasurable_minimize(f0: &DistributionField, damping: f64, tol: f64, max_iter: usize) -> Result<EquimeasurableResult> {
    if !(damping > 0.0 && damping <= 1.0) || !(tol > 0.0) {
        return Err(HmfError::InvalidArgument("need damping in (0, 1] and tol > 0".into()));
    }
    if !(integrate(f0) > 0.0) {
        return Err(HmfError::InvalidField("initial field has zero mass".into()));
    }
    let mut phi = solve_potential(f0);
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    for k in 0..=max_iter {
        let g = rearrange_with_energy(f0, &phi)?;
        let next = solve_potential(&g);
        history.push(hamiltonian(&g));
        residual = next.sup_distance(&phi);
        if residual <= tol {
            return Ok(EquimeasurableResult {
                field: g,
                potential: phi,
                fixed_point_residual: residual,
                iterations: k,
                hamiltonian_history: history,
            });
        }
        phi = phi.blend(&next, damping);
    }
    Err(HmfError::NonConvergence { what: "equimeasurable iteration", iterations: max_iter, residual })
}
