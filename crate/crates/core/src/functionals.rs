//! Conserved quantities, variational functionals and distances.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::casimir::CasimirSpec;
use crate::error::{HmfError, Result};
use crate::grid::{integrate, DistributionField, Potential};
use crate::interaction::solve_potential;

/// One row of the diagnostics time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub mass: f64,
    pub momentum: f64,
    pub kinetic: f64,
    /// `1/2 \int phi'^2`.
    pub potential_energy: f64,
    pub hamiltonian: f64,
    pub casimir: f64,
    pub l_infinity: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "time,mass,momentum,kinetic,potential_energy,hamiltonian,casimir,l_infinity";

    pub fn compute(f: &DistributionField, spec: &CasimirSpec, time: f64) -> Self {
        let phi = solve_potential(f);
        Self::with_potential(f, &phi, spec, time)
    }

    pub fn with_potential(f: &DistributionField, phi: &Potential, spec: &CasimirSpec, time: f64) -> Self {
        let kinetic = kinetic(f);
        let potential_energy = 0.5 * phi.gradient_norm_sq();
        Self {
            time,
            mass: integrate(f),
            momentum: momentum(f),
            kinetic,
            potential_energy,
            hamiltonian: kinetic - potential_energy,
            casimir: casimir_integral(f, spec),
            l_infinity: f.max_value(),
        }
    }

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{}",
            self.time,
            self.mass,
            self.momentum,
            self.kinetic,
            self.potential_energy,
            self.hamiltonian,
            self.casimir,
            self.l_infinity
        )
        .unwrap();
        s
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| HmfError::InvalidArgument(format!("bad diagnostics row {line:?}")))?;
        if cols.len() != 8 {
            return Err(HmfError::InvalidArgument(format!("expected 8 columns, got {}", cols.len())));
        }
        Ok(Self {
            time: cols[0],
            mass: cols[1],
            momentum: cols[2],
            kinetic: cols[3],
            potential_energy: cols[4],
            hamiltonian: cols[5],
            casimir: cols[6],
            l_infinity: cols[7],
        })
    }
}

pub fn mass(f: &DistributionField) -> f64 {
    integrate(f)
}

/// `\iint v f`.
pub fn momentum(f: &DistributionField) -> f64 {
    velocity_moment(f, |v| v)
}

/// `\iint v^2/2 f`.
pub fn kinetic(f: &DistributionField) -> f64 {
    velocity_moment(f, |v| 0.5 * v * v)
}

fn velocity_moment(f: &DistributionField, w: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    let weights: Vec<f64> = g.velocities().into_iter().map(w).collect();
    let mut total = 0.0;
    for row in f.values().chunks_exact(g.n_v()) {
        total += row.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>();
    }
    total * g.cell_area()
}

/// `1/2 \int phi_f'^2`.
pub fn potential_energy(f: &DistributionField) -> f64 {
    0.5 * solve_potential(f).gradient_norm_sq()
}

/// `H(f) = \iint v^2/2 f - 1/2 \int phi_f'^2`.
pub fn hamiltonian(f: &DistributionField) -> f64 {
    kinetic(f) - potential_energy(f)
}

/// `\iint j(f)`; empty cells contribute 0.
pub fn casimir_integral(f: &DistributionField, spec: &CasimirSpec) -> f64 {
    f.values().iter().map(|&x| spec.j(x)).sum::<f64>() * f.grid().cell_area()
}

/// `J(f) = H(f) + \iint j(f)`.
#[allow(non_snake_case)]
pub fn free_energy_J(f: &DistributionField, spec: &CasimirSpec) -> f64 {
    hamiltonian(f) + casimir_integral(f, spec)
}

/// `-pi M^2 / 4`, the a priori lower bound of `H` at mass `M`.
pub fn hamiltonian_lower_bound(mass: f64) -> f64 {
    -PI * mass * mass / 4.0
}

/// Lower bound of `J` for the entropy Casimir:
/// `-pi M^2 / 4 + M (ln M - ln(2 pi sqrt(2 pi)))`.
pub fn entropy_free_energy_lower_bound(mass: f64) -> f64 {
    let c1 = (2.0 * PI * (2.0 * PI).sqrt()).ln();
    hamiltonian_lower_bound(mass) + if mass > 0.0 { mass * (mass.ln() - c1) } else { 0.0 }
}

/// Minimizes `\iint (1 + v^2) |f(theta + s, v) - g(theta, v)|` over the grid
/// shifts `s = k d_theta`, `k = 0..n_theta`. Returns the distance and `s`;
/// ties go to the smallest `k`.
pub fn orbital_distance(f: &DistributionField, g: &DistributionField) -> Result<(f64, f64)> {
    f.same_grid(g)?;
    let grid = *f.grid();
    let n = grid.n_theta();
    let n_v = grid.n_v();
    let weights: Vec<f64> = grid.velocities().iter().map(|v| 1.0 + v * v).collect();
    let fv = f.values();
    let gv = g.values();
    let (dist, k) = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut total = 0.0;
            for i in 0..n {
                let src = (i + k) % n;
                let fr = &fv[src * n_v..(src + 1) * n_v];
                let gr = &gv[i * n_v..(i + 1) * n_v];
                for j in 0..n_v {
                    total += weights[j] * (fr[j] - gr[j]).abs();
                }
            }
            (total * grid.cell_area(), k)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok((dist, k as f64 * grid.d_theta()))
}

/// `\iint f ln(f / f1)`. Cells with `f = 0` contribute 0; `f > 0` where
/// `f1 = 0` is a support violation.
pub fn relative_entropy(f: &DistributionField, f1: &DistributionField) -> Result<f64> {
    f.same_grid(f1)?;
    let mut total = 0.0;
    for (k, (&a, &b)) in f.values().iter().zip(f1.values()).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(HmfError::SupportViolation(format!("reference vanishes at cell {k} where f = {a}")));
            }
            total += a * (a / b).ln();
        }
    }
    Ok(total * f.grid().cell_area())
}

/// `(||f - f0||_1^2, 2 M \iint f ln(f / f0))` for fields of equal mass `M`.
pub fn csiszar_kullback_gap(f: &DistributionField, f0: &DistributionField) -> Result<(f64, f64)> {
    f.same_grid(f0)?;
    let m = integrate(f);
    let m0 = integrate(f0);
    if (m - m0).abs() > 1e-8 * m.abs().max(m0.abs()).max(f64::MIN_POSITIVE) {
        return Err(HmfError::InvalidArgument(format!("masses differ: {m} vs {m0}")));
    }
    let l1 = f.values().iter().zip(f0.values()).map(|(a, b)| (a - b).abs()).sum::<f64>() * f.grid().cell_area();
    Ok((l1 * l1, 2.0 * m * relative_entropy(f, f0)?))
}

/// `(\iint f ln(f / f1), M_f (ln M_f - ln M_f1))`; the first never falls below
/// the second.
pub fn jensen_gap(f: &DistributionField, f1: &DistributionField) -> Result<(f64, f64)> {
    let lhs = relative_entropy(f, f1)?;
    let m = integrate(f);
    let m1 = integrate(f1);
    let rhs = if m > 0.0 { m * (m.ln() - m1.ln()) } else { 0.0 };
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use approx::assert_relative_eq;

    #[test]
    fn zero_field() {
        let g = make_grid(16, 16, 2.0).unwrap();
        let z = DistributionField::zeros(g);
        let spec = CasimirSpec::entropy();
        assert_eq!(hamiltonian(&z), 0.0);
        assert_eq!(free_energy_J(&z, &spec), 0.0);
        assert_eq!(casimir_integral(&z, &spec), 0.0);
    }

    #[test]
    fn gaussian_kinetic_energy() {
        let g = make_grid(16, 256, 8.0).unwrap();
        let f = DistributionField::from_fn(g, |_, v| (-v * v / 2.0).exp() / (2.0 * PI).sqrt()).unwrap();
        assert_relative_eq!(hamiltonian(&f), PI, epsilon = 1e-9);
        assert_relative_eq!(mass(&f), 2.0 * PI, epsilon = 1e-9);
        assert!(momentum(&f).abs() < 1e-14);
    }

    #[test]
    fn constant_casimirs() {
        let g = make_grid(8, 8, 1.0).unwrap();
        let one = DistributionField::from_fn(g, |_, _| 1.0).unwrap();
        assert_relative_eq!(casimir_integral(&one, &CasimirSpec::power(2.0).unwrap()), 4.0 * PI, max_relative = 1e-14);
        assert_eq!(casimir_integral(&one, &CasimirSpec::entropy()), 0.0);
        let g = make_grid(8, 8, 3.0).unwrap();
        let e = DistributionField::from_fn(g, |_, _| std::f64::consts::E).unwrap();
        assert_relative_eq!(
            casimir_integral(&e, &CasimirSpec::entropy()),
            std::f64::consts::E * 2.0 * PI * 6.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn record_round_trip() {
        let g = make_grid(16, 16, 3.0).unwrap();
        let f = DistributionField::from_fn(g, |t, v| (1.0 + 0.3 * t.cos()) * (-v * v).exp()).unwrap();
        let r = DiagnosticsRecord::compute(&f, &CasimirSpec::entropy(), 0.25);
        assert_relative_eq!(r.hamiltonian, r.kinetic - r.potential_energy, max_relative = 1e-12);
        assert_eq!(DiagnosticsRecord::parse_csv_row(&r.csv_row()).unwrap(), r);
        assert_eq!(DiagnosticsRecord::CSV_HEADER.split(',').count(), 8);
    }

    #[test]
    fn orbital_distance_finds_cyclic_shift() {
        let g = make_grid(32, 16, 3.0).unwrap();
        let f = DistributionField::from_fn(g, |t, v| (2.0 + (t - 1.0).cos() + 0.3 * (2.0 * t).sin()) * (-v * v).exp()).unwrap();
        let (d, s) = orbital_distance(&f, &f).unwrap();
        assert_eq!((d, s), (0.0, 0.0));
        for k in [1isize, 5, 31] {
            // shifted right by k cells
            let shifted = f.shift_theta_cells(-k);
            let (d, s) = orbital_distance(&f, &shifted).unwrap();
            assert_eq!(d, 0.0);
            assert_relative_eq!(s, (32 - k) as f64 * g.d_theta(), max_relative = 1e-14);
        }
    }

    #[test]
    fn csiszar_kullback_for_shifted_gaussians() {
        let g = make_grid(16, 256, 10.0).unwrap();
        let gauss = |m: f64| {
            DistributionField::from_fn(g, move |_, v| (-(v - m) * (v - m) / 2.0).exp() / (2.0 * PI).sqrt()).unwrap()
        };
        let (f, f0) = (gauss(0.4), gauss(0.0));
        let (lhs, rhs) = csiszar_kullback_gap(&f, &f0).unwrap();
        assert!(lhs > 0.0 && lhs <= rhs);
        // relative entropy of unit Gaussians is m^2/2 per unit mass
        assert_relative_eq!(rhs, 2.0 * (2.0 * PI) * (2.0 * PI) * 0.08, max_relative = 1e-9);
        assert_eq!(csiszar_kullback_gap(&f0, &f0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn support_violation_is_reported() {
        let g = make_grid(8, 8, 1.0).unwrap();
        let f = DistributionField::from_fn(g, |_, _| 1.0).unwrap();
        let f0 = DistributionField::from_fn(g, |t, _| if t < 1.0 { 0.0 } else { 8.0 / 7.0 }).unwrap();
        assert!(matches!(relative_entropy(&f, &f0), Err(HmfError::SupportViolation(_))));
    }
}
