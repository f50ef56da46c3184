//! Mapping a field onto the constraint manifold by amplitude scaling and
//! velocity dilation, `g -> gamma g(theta, gamma v / lambda)`.

use crate::casimir::CasimirSpec;
use crate::error::{HmfError, Result};
use crate::functionals::casimir_integral;
use crate::grid::{integrate, DistributionField};

use super::multipliers::BISECTION_CAP;
use super::ConstraintSet;

const EXACT: f64 = 1e-12;

/// `(lambda, gamma)` with `lambda = M1 / ||g||_1` and
/// `\iint j(gamma g) / gamma = M_j ||g||_1 / M1`; `gamma = 1` without a
/// Casimir constraint.
pub fn renormalization_gamma(g: &DistributionField, spec: &CasimirSpec, constraints: &ConstraintSet) -> Result<(f64, f64)> {
    let mass = integrate(g);
    if !(mass > 0.0) {
        return Err(HmfError::InvalidField("cannot renormalize a field of zero mass".into()));
    }
    let lambda = constraints.m1 / mass;
    let Some(mj) = constraints.mj else {
        return Ok((lambda, 1.0));
    };
    if !spec.h3() {
        return Err(HmfError::Unsupported(format!("{spec}: two-constraint renormalization needs (p, q) growth bounds")));
    }
    let target = (mj * mass / constraints.m1).ln();
    let gap = |t: f64| (casimir_integral(&g.scaled(t.exp()), spec) / t.exp()).ln() - target;
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut ok = false;
    for _ in 0..BISECTION_CAP {
        let (a, b) = (gap(lo), gap(hi));
        if a < 0.0 && b >= 0.0 {
            ok = true;
            break;
        }
        if a >= 0.0 {
            lo -= 2.0 * (hi - lo);
        }
        if b < 0.0 {
            hi += 2.0 * (hi - lo);
        }
    }
    if !ok {
        return Err(HmfError::BracketFailure("renormalization gamma"));
    }
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lambda, (0.5 * (lo + hi)).exp()))
}

/// `h(theta, v) = g(theta, s v)`, linear in `v` with zero outside the grid.
fn dilate(g: &DistributionField, s: f64) -> DistributionField {
    let grid = *g.grid();
    let n_v = grid.n_v();
    let (dv, vmax) = (grid.d_v(), grid.v_max());
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.n_theta() {
        let row = g.row(i);
        let at = |k: isize| if k >= 0 && (k as usize) < n_v { row[k as usize] } else { 0.0 };
        for j in 0..n_v {
            let x = (s * grid.v(j) + vmax) / dv - 0.5;
            let k = x.floor();
            let a = x - k;
            let k = k as isize;
            values.push(((1.0 - a) * at(k) + a * at(k + 1)).max(0.0));
        }
    }
    DistributionField::from_raw(grid, values)
}

/// Rescales `g` so that it carries mass `m1` and, when present, Casimir `mj`.
///
/// The dilation factor starts from `gamma / lambda` and is then adjusted by
/// bisection so that the resampled field meets both constraints on the grid
/// to rounding.
pub fn renormalize_to_constraints(g: &DistributionField, spec: &CasimirSpec, constraints: &ConstraintSet) -> Result<DistributionField> {
    let m1 = constraints.m1;
    let mass = integrate(g);
    let mass_ok = (mass - m1).abs() <= EXACT * m1;
    let casimir_ok = constraints.mj.map_or(true, |mj| (casimir_integral(g, spec) - mj).abs() <= EXACT * mj);
    if mass_ok && casimir_ok {
        return Ok(g.clone());
    }
    let (lambda, gamma) = renormalization_gamma(g, spec, constraints)?;
    let normalized = |s: f64| -> Result<DistributionField> {
        let h = dilate(g, s);
        let mh = integrate(&h);
        if !(mh > 0.0) {
            return Err(HmfError::BracketFailure("velocity dilation"));
        }
        Ok(h.scaled(m1 / mh))
    };
    let Some(mj) = constraints.mj else {
        return normalized(1.0 / lambda);
    };
    let s0 = (gamma / lambda).ln();
    let gap = |t: f64| -> Result<f64> { Ok(casimir_integral(&normalized(t.exp())?, spec).ln() - mj.ln()) };
    let (mut lo, mut hi) = (s0 - 0.05, s0 + 0.05);
    let mut ok = false;
    for _ in 0..60 {
        let (a, b) = (gap(lo)?, gap(hi)?);
        if a < 0.0 && b >= 0.0 {
            ok = true;
            break;
        }
        if a >= 0.0 {
            lo -= hi - lo;
        }
        if b < 0.0 {
            hi += hi - lo;
        }
    }
    if !ok {
        return Err(HmfError::BracketFailure("velocity dilation"));
    }
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (a, b) = (normalized(lo.exp())?, normalized(hi.exp())?);
    let err = |f: &DistributionField| (casimir_integral(f, spec) - mj).abs();
    Ok(if err(&a) < err(&b) { a } else { b })
}
