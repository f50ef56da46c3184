//! Phase-space discretization of the torus times a truncated velocity line.
//!
//! Fields are sampled at cell centers and integrated with the midpoint rule.
//! Values are stored row-major with theta as the outer index.

use std::f64::consts::PI;

use crate::error::{HmfError, Result};
use crate::spectral;

/// Uniform cell-centered grid on `[0, 2pi) x [-v_max, v_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    n_theta: usize,
    n_v: usize,
    v_max: f64,
}

/// Smallest admissible number of cells in either direction.
pub const MIN_CELLS: usize = 8;

impl PhaseGrid {
    pub fn new(n_theta: usize, n_v: usize, v_max: f64) -> Result<Self> {
        if n_theta < MIN_CELLS || n_v < MIN_CELLS {
            return Err(HmfError::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells per direction, got {n_theta} x {n_v}"
            )));
        }
        if !(v_max > 0.0) || !v_max.is_finite() {
            return Err(HmfError::InvalidGrid(format!("v_max must be positive, got {v_max}")));
        }
        Ok(Self { n_theta, n_v, v_max })
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    #[inline]
    pub fn n_v(&self) -> usize {
        self.n_v
    }

    #[inline]
    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    #[inline]
    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    #[inline]
    pub fn d_v(&self) -> f64 {
        2.0 * self.v_max / self.n_v as f64
    }

    /// Quadrature weight of one cell.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.d_theta() * self.d_v()
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.d_theta()
    }

    /// Cell-center velocity. Written so that `v(j) == -v(n_v - 1 - j)` holds
    /// bit for bit.
    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        (j as f64 + 0.5 - 0.5 * self.n_v as f64) * self.d_v()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta).map(|i| self.theta(i)).collect()
    }

    pub fn velocities(&self) -> Vec<f64> {
        (0..self.n_v).map(|j| self.v(j)).collect()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_v + j
    }

    /// Grid with both cell counts doubled.
    pub fn refined(&self) -> Self {
        Self { n_theta: 2 * self.n_theta, n_v: 2 * self.n_v, v_max: self.v_max }
    }
}

pub fn make_grid(n_theta: usize, n_v: usize, v_max: f64) -> Result<PhaseGrid> {
    PhaseGrid::new(n_theta, n_v, v_max)
}

/// Nonnegative phase-space density sampled at the cell centers of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionField {
    grid: PhaseGrid,
    values: Vec<f64>,
}

impl DistributionField {
    pub fn new(grid: PhaseGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HmfError::InvalidField(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(HmfError::InvalidField(format!(
                "value {} at cell {} is negative or not finite",
                values[k], k
            )));
        }
        Ok(Self { grid, values })
    }

    /// Skips validation; callers guarantee nonnegative finite values.
    pub(crate) fn from_raw(grid: PhaseGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    /// Samples `f(theta, v)` at every cell center. Negative samples are an error.
    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_theta() {
            let theta = grid.theta(i);
            for j in 0..grid.n_v() {
                values.push(f(theta, grid.v(j)));
            }
        }
        Self::new(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Velocity column at theta node `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n_v = self.grid.n_v();
        &self.values[i * n_v..(i + 1) * n_v]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor >= 0.0 && factor.is_finite());
        Self::from_raw(self.grid, self.values.iter().map(|x| x * factor).collect())
    }

    /// `g(theta_i, v) = f(theta_{i + k}, v)`, i.e. `f(theta + k d_theta, v)`.
    pub fn shift_theta_cells(&self, k: isize) -> Self {
        let n = self.grid.n_theta() as isize;
        let n_v = self.grid.n_v();
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..n {
            let src = (i + k).rem_euclid(n) as usize;
            values.extend_from_slice(&self.values[src * n_v..(src + 1) * n_v]);
        }
        Self::from_raw(self.grid, values)
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(HmfError::GridMismatch)
        }
    }
}

/// Midpoint quadrature of a field over the whole grid.
pub fn integrate(field: &DistributionField) -> f64 {
    field.values.iter().sum::<f64>() * field.grid.cell_area()
}

/// `\iint (1 + v^2) |f - g|` by midpoint quadrature.
pub fn weighted_l1_distance(f: &DistributionField, g: &DistributionField) -> Result<f64> {
    f.same_grid(g)?;
    Ok(weighted_l1_unchecked(f.values(), g.values(), f.grid()))
}

pub(crate) fn weighted_l1_unchecked(f: &[f64], g: &[f64], grid: &PhaseGrid) -> f64 {
    let n_v = grid.n_v();
    let weights: Vec<f64> = (0..n_v).map(|j| 1.0 + grid.v(j) * grid.v(j)).collect();
    let mut total = 0.0;
    for (fr, gr) in f.chunks_exact(n_v).zip(g.chunks_exact(n_v)) {
        for j in 0..n_v {
            total += weights[j] * (fr[j] - gr[j]).abs();
        }
    }
    total * grid.cell_area()
}

/// Zero-mean periodic potential on the theta nodes, with its derivative.
///
/// Potentials are band-limited to the modes the grid resolves: the mean and
/// (for even `n_theta`) the Nyquist mode are removed on construction, and the
/// derivative is the exact derivative of the remaining trigonometric
/// interpolant.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    grid: PhaseGrid,
    values: Vec<f64>,
    derivative: Vec<f64>,
}

impl Potential {
    pub fn zero(grid: PhaseGrid) -> Self {
        let n = grid.n_theta();
        Self { grid, values: vec![0.0; n], derivative: vec![0.0; n] }
    }

    pub fn from_values(grid: PhaseGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.n_theta() {
            return Err(HmfError::InvalidArgument(format!(
                "potential needs {} samples, got {}",
                grid.n_theta(),
                values.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(HmfError::InvalidArgument("potential has non-finite samples".into()));
        }
        let (values, derivative) = spectral::band_limit_with_derivative(values);
        Ok(Self { grid, values, derivative })
    }

    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = grid.thetas().into_iter().map(f).collect();
        Self::from_values(grid, &samples)
    }

    /// Used by solvers that produce values and derivative together.
    pub(crate) fn from_parts(grid: PhaseGrid, values: Vec<f64>, derivative: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_theta());
        debug_assert_eq!(derivative.len(), grid.n_theta());
        Self { grid, values, derivative }
    }

    #[inline]
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &x) in self.values.iter().enumerate() {
            if x < self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup_distance(&self, other: &Potential) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `(1 - w) * self + w * other`.
    pub fn blend(&self, other: &Potential, w: f64) -> Potential {
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y).collect()
        };
        Potential {
            grid: self.grid,
            values: mix(&self.values, &other.values),
            derivative: mix(&self.derivative, &other.derivative),
        }
    }

    /// Same convention as [`DistributionField::shift_theta_cells`].
    pub fn shift_theta_cells(&self, k: isize) -> Potential {
        let n = self.values.len() as isize;
        let pick = |src: &[f64]| -> Vec<f64> {
            (0..n).map(|i| src[(i + k).rem_euclid(n) as usize]).collect()
        };
        Potential { grid: self.grid, values: pick(&self.values), derivative: pick(&self.derivative) }
    }

    /// `\int phi'^2 d theta` by the node rule.
    pub fn gradient_norm_sq(&self) -> f64 {
        self.derivative.iter().map(|d| d * d).sum::<f64>() * self.grid.d_theta()
    }
}
