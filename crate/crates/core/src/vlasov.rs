//! Strang-split semi-Lagrangian integration of
//! `d_t f + v d_theta f - phi_f' d_v f = 0`.
//!
//! One step is a half step of free transport in theta, a field solve, a full
//! step of acceleration in v, and a second half transport step. Both
//! advections follow characteristics backwards and interpolate; theta is
//! periodic and v has zero inflow at `+-v_max`.

use rayon::prelude::*;

use crate::casimir::CasimirSpec;
use crate::error::{HmfError, Result};
use crate::functionals::DiagnosticsRecord;
use crate::grid::{integrate, DistributionField};
use crate::interaction::solve_potential;

pub const MAX_DT: f64 = 0.5;
const RENORMALIZE_ABOVE: f64 = 1e-13;
const NODE_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Interpolation {
    #[default]
    Linear,
    /// Four-point Lagrange; negative values are clipped to zero.
    Cubic,
}

impl std::str::FromStr for Interpolation {
    type Err = HmfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Self::Linear),
            "cubic" => Ok(Self::Cubic),
            other => Err(HmfError::InvalidArgument(format!("unknown interpolation {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub interpolation: Interpolation,
    pub record_every: usize,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(HmfError::InvalidArgument(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(HmfError::InvalidArgument(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(HmfError::InvalidArgument("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Result of an advection step.
#[derive(Clone, Debug)]
pub struct Advected {
    pub field: DistributionField,
    /// Mass that left through `|v| = v_max`.
    pub boundary_loss: f64,
    /// Mass added back by clipping negative cubic values.
    pub clipped_mass: f64,
}

/// Interpolation weights and base offset for the point `k + a`, `0 <= a < 1`.
fn stencil(interp: Interpolation, a: f64) -> (isize, [f64; 4]) {
    match interp {
        Interpolation::Linear => (0, [1.0 - a, a, 0.0, 0.0]),
        Interpolation::Cubic => (
            -1,
            [
                -a * (a - 1.0) * (a - 2.0) / 6.0,
                (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0,
                -(a + 1.0) * a * (a - 2.0) / 2.0,
                (a + 1.0) * a * (a - 1.0) / 6.0,
            ],
        ),
    }
}

fn split_offset(x: f64) -> (isize, f64) {
    let k = x.floor();
    let mut a = x - k;
    let mut k = k as isize;
    if a < NODE_SNAP {
        a = 0.0;
    } else if a > 1.0 - NODE_SNAP {
        a = 0.0;
        k += 1;
    }
    (k, a)
}

/// Samples `src` at `i + shift` for every `i`; periodic or zero-extended.
/// Returns the sum of clipped negative parts.
fn shift_line(src: &[f64], dst: &mut [f64], shift: f64, periodic: bool, interp: Interpolation) -> f64 {
    let n = src.len() as isize;
    let (k0, a) = split_offset(shift);
    let (base, w) = stencil(interp, a);
    let at = |idx: isize| -> f64 {
        if periodic {
            src[idx.rem_euclid(n) as usize]
        } else if (0..n).contains(&idx) {
            src[idx as usize]
        } else {
            0.0
        }
    };
    let mut clipped = 0.0;
    for (i, out) in dst.iter_mut().enumerate() {
        let j = i as isize + k0 + base;
        let mut acc = 0.0;
        for (m, wm) in w.iter().enumerate() {
            if *wm != 0.0 {
                acc += wm * at(j + m as isize);
            }
        }
        if acc < 0.0 {
            clipped -= acc;
            acc = 0.0;
        }
        *out = acc;
    }
    clipped
}

/// `f_new(theta, v) = f(theta - v dt, v)`.
pub fn advect_theta(f: &DistributionField, dt: f64, interp: Interpolation) -> Advected {
    let grid = *f.grid();
    let (n_t, n_v) = (grid.n_theta(), grid.n_v());
    let dth = grid.d_theta();
    let columns: Vec<(Vec<f64>, f64)> = (0..n_v)
        .into_par_iter()
        .map(|j| {
            let src: Vec<f64> = (0..n_t).map(|i| f.values()[i * n_v + j]).collect();
            let mut dst = vec![0.0; n_t];
            let clipped = shift_line(&src, &mut dst, -grid.v(j) * dt / dth, true, interp);
            (dst, clipped)
        })
        .collect();
    let mut values = vec![0.0; grid.len()];
    let mut clipped = 0.0;
    for (j, (col, c)) in columns.iter().enumerate() {
        for i in 0..n_t {
            values[i * n_v + j] = col[i];
        }
        clipped += c;
    }
    Advected {
        field: DistributionField::from_raw(grid, values),
        boundary_loss: 0.0,
        clipped_mass: clipped * grid.cell_area(),
    }
}

/// `f_new(theta, v) = f(theta, v + phi'(theta) dt)`.
pub fn advect_v(f: &DistributionField, phi_prime: &[f64], dt: f64, interp: Interpolation) -> Result<Advected> {
    let grid = *f.grid();
    if phi_prime.len() != grid.n_theta() {
        return Err(HmfError::GridMismatch);
    }
    let n_v = grid.n_v();
    let dv = grid.d_v();
    let rows: Vec<(Vec<f64>, f64)> = (0..grid.n_theta())
        .into_par_iter()
        .map(|i| {
            let mut dst = vec![0.0; n_v];
            let clipped = shift_line(f.row(i), &mut dst, phi_prime[i] * dt / dv, false, interp);
            (dst, clipped)
        })
        .collect();
    let before = integrate(f);
    let mut values = Vec::with_capacity(grid.len());
    let mut clipped = 0.0;
    for (row, c) in rows {
        values.extend_from_slice(&row);
        clipped += c;
    }
    let field = DistributionField::from_raw(grid, values);
    let clipped_mass = clipped * grid.cell_area();
    let boundary_loss = (before - (integrate(&field) - clipped_mass)).max(0.0);
    Ok(Advected { field, boundary_loss, clipped_mass })
}

/// One Strang step: half transport, field solve, full acceleration, half
/// transport.
pub fn strang_step(f: &DistributionField, dt: f64, interp: Interpolation) -> Advected {
    let a = advect_theta(f, 0.5 * dt, interp);
    let phi = solve_potential(&a.field);
    let b = advect_v(&a.field, phi.derivative(), dt, interp).expect("potential lives on the field grid");
    let c = advect_theta(&b.field, 0.5 * dt, interp);
    Advected {
        field: c.field,
        boundary_loss: b.boundary_loss,
        clipped_mass: a.clipped_mass + b.clipped_mass + c.clipped_mass,
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOutcome {
    pub field: DistributionField,
    pub steps: usize,
    pub time: f64,
    pub boundary_loss: f64,
    pub clipped_mass: f64,
}

/// Repeated Strang steps from `f0` to `t_end`. `observer` sees the record
/// and field at steps `0, k, 2k, ...` with `k = record_every`. After each
/// step the field is rescaled to the initial mass when the relative
/// deviation exceeds `1e-13`.
pub fn evolve(
    f0: &DistributionField,
    config: &SolverConfig,
    spec: &CasimirSpec,
    mut observer: impl FnMut(usize, &DiagnosticsRecord, &DistributionField) -> Result<()>,
) -> Result<EvolveOutcome> {
    config.validate()?;
    let steps = config.steps();
    let m0 = integrate(f0);
    let mut f = f0.clone();
    let mut boundary_loss = 0.0;
    let mut clipped_mass = 0.0;
    observer(0, &DiagnosticsRecord::compute(&f, spec, 0.0), &f)?;
    for step in 1..=steps {
        let out = strang_step(&f, config.dt, config.interpolation);
        boundary_loss += out.boundary_loss;
        clipped_mass += out.clipped_mass;
        f = out.field;
        if f.values().iter().any(|x| !x.is_finite()) {
            return Err(HmfError::SolverAbort { step, reason: "non-finite values in the distribution".into() });
        }
        let m = integrate(&f);
        if m0 > 0.0 && (m - m0).abs() > RENORMALIZE_ABOVE * m0 {
            if !(m > 0.0) {
                return Err(HmfError::SolverAbort { step, reason: "all mass left the velocity domain".into() });
            }
            f = f.scaled(m0 / m);
        }
        if step % config.record_every == 0 {
            observer(step, &DiagnosticsRecord::compute(&f, spec, step as f64 * config.dt), &f)?;
        }
    }
    Ok(EvolveOutcome { field: f, steps, time: steps as f64 * config.dt, boundary_loss, clipped_mass })
}
