use num_complex::Complex64;

use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::ComplexField;

/// Retarded Duhamel integral `int_0^t exp(i (t - t') d_xx) f(t') dt'` by the
/// trapezoidal rule over the forcing snapshots.
///
/// The lower limit is the forcing's first time. When `t` falls between
/// snapshots, the integrand is interpolated linearly on the last partial
/// interval.
pub fn duhamel(forcing: &Trajectory, t: f64) -> Result<ComplexField> {
    let start = forcing.times[0];
    let end = *forcing.times.last().expect("non-empty");
    let tol = 1e-12 * end.abs().max(1.0);
    if !(t >= start - tol && t <= end + tol) {
        return Err(Error::Range { time: t, start, end });
    }
    let grid = forcing.grid.clone();
    let xi = grid.fft_wavenumbers();
    let n = grid.n_points();
    // integrand spectrum exp(-i (t - s) xi^2) hat f(s)
    let integrand = |k: usize| -> Vec<Complex64> {
        let s = forcing.times[k];
        let spec = forcing.snapshots[k].spectrum();
        spec.iter()
            .zip(xi)
            .map(|(c, &x)| c * Complex64::new(0.0, -(t - s) * x * x).exp())
            .collect()
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    let mut add = |w: f64, v: &[Complex64]| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += w * b;
        }
    };
    let mut prev = integrand(0);
    let mut k = 0;
    while k + 1 < forcing.len() && forcing.times[k + 1] <= t + tol {
        let next = integrand(k + 1);
        let h = forcing.times[k + 1] - forcing.times[k];
        add(0.5 * h, &prev);
        add(0.5 * h, &next);
        prev = next;
        k += 1;
    }
    let tail = t - forcing.times[k];
    if tail > tol && k + 1 < forcing.len() {
        let h = forcing.times[k + 1] - forcing.times[k];
        let next = integrand(k + 1);
        let theta = tail / h;
        let mid: Vec<Complex64> = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        add(0.5 * tail, &prev);
        add(0.5 * tail, &mid);
    }
    ComplexField::from_spectrum(grid, acc)
}
