//! Small FFT helpers for periodic functions sampled on the theta nodes.
//!
//! Mode `k` of an `n`-point signal is treated as the wavenumber `k` for
//! `k < n/2` and `k - n` above. The Nyquist mode of an even-length signal is
//! discarded: its derivative vanishes at every node, so keeping it would break
//! the discrete integration-by-parts identities the functionals rely on.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf
}

pub(crate) fn inverse_real(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    let n = spectrum.len();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n).process(&mut spectrum);
    let scale = 1.0 / n as f64;
    spectrum.into_iter().map(|c| c.re * scale).collect()
}

/// Signed wavenumber of FFT bin `k`, or `None` for the Nyquist bin.
pub(crate) fn wavenumber(k: usize, n: usize) -> Option<f64> {
    if n % 2 == 0 && k == n / 2 {
        return None;
    }
    if k <= n / 2 {
        Some(k as f64)
    } else {
        Some(k as f64 - n as f64)
    }
}

/// Removes the mean and the Nyquist mode; returns the filtered samples and
/// their spectral derivative.
pub(crate) fn band_limit_with_derivative(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let mut spec = forward(values);
    spec[0] = Complex64::new(0.0, 0.0);
    let mut dspec = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..n {
        match wavenumber(k, n) {
            Some(kk) => dspec[k] = spec[k] * Complex64::new(0.0, kk),
            None => spec[k] = Complex64::new(0.0, 0.0),
        }
    }
    (inverse_real(spec), inverse_real(dspec))
}

/// Zero-mean periodic solution of `u'' = rhs - mean(rhs)` and its derivative.
pub(crate) fn solve_poisson(rhs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = rhs.len();
    let spec = forward(rhs);
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    let mut du = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..n {
        if let Some(kk) = wavenumber(k, n) {
            u[k] = -spec[k] / (kk * kk);
            du[k] = u[k] * Complex64::new(0.0, kk);
        }
    }
    (inverse_real(u), inverse_real(du))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_low_modes_is_exact() {
        let n = 32;
        let x: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let f: Vec<f64> = x.iter().map(|&t| (3.0 * t).sin() + 0.5 * t.cos()).collect();
        let (g, dg) = band_limit_with_derivative(&f);
        for i in 0..n {
            assert!((g[i] - f[i]).abs() < 1e-13);
            let exact = 3.0 * (3.0 * x[i]).cos() - 0.5 * x[i].sin();
            assert!((dg[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_inverts_second_derivative() {
        let n = 16;
        let x: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let rhs: Vec<f64> = x.iter().map(|&t| 2.0 + (2.0 * t).cos()).collect();
        let (u, du) = solve_poisson(&rhs);
        for i in 0..n {
            assert!((u[i] + (2.0 * x[i]).cos() / 4.0).abs() < 1e-14);
            assert!((du[i] - (2.0 * x[i]).sin() / 2.0).abs() < 1e-14);
        }
    }
}
