use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{run, EquationKind, EquationSpec, SolverConfig};
use crate::spectral::{Field, Grid, RealField};

/// Default cap on the number of points of the dilated grid.
pub const DEFAULT_MAX_POINTS: usize = 1 << 22;

/// `lambda^{-1/2} u(x / lambda)` on the grid of length `lambda L` with
/// `lambda n` points, by exact trigonometric interpolation. The Nyquist
/// coefficient of `u`, if any, is split evenly between `+-n/2`.
pub fn dilate(u: &RealField, lambda: f64, max_points: usize) -> Result<RealField> {
    dilate_with(u, lambda, 0.5, max_points)
}

/// `lambda^{-alpha} u(x / lambda)` on the dilated grid.
fn dilate_with(u: &RealField, lambda: f64, alpha: f64, max_points: usize) -> Result<RealField> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("scaling factor must be >= 1, got {lambda}")));
    }
    let grid = u.grid();
    let n = grid.n_points();
    let m_real = lambda * n as f64;
    let m = m_real.round() as usize;
    if (m_real - m as f64).abs() > 1e-9 * m_real || !m.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "lambda n = {m_real} must be an even integer"
        )));
    }
    if m > max_points {
        return Err(Error::Parameter(format!(
            "dilated grid needs {m} points, cap is {max_points}"
        )));
    }
    if m == n {
        return Ok(u.clone());
    }
    let big = Grid::new(m, lambda * grid.length())?;
    let spec = u.spectrum();
    let shift = lambda.powf(-alpha);
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let half = n / 2;
    for j in 0..half {
        out[j] = spec[j] * shift;
        if j > 0 {
            out[m - j] = spec[n - j] * shift;
        }
    }
    if m > n {
        out[half] = 0.5 * spec[half] * shift;
        out[m - half] = 0.5 * spec[half] * shift;
    } else {
        out[half] = spec[half] * shift;
    }
    // both grids are indexed from their left edge and x / lambda maps one
    // left edge onto the other, so coefficients carry over unchanged
    RealField::from_spectrum(big, out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub lambda: f64,
    /// `| ||u_lambda||_{L^2} / ||u||_{L^2} - 1 |`
    pub l2_error: f64,
    /// `||u_lambda||_{H^{1/2} hom} / ||u||_{H^{1/2} hom}`
    pub h_half_ratio: f64,
    /// `| h_half_ratio - lambda^{-1/2} |`
    pub h_half_error: f64,
    /// `max |u_lambda(lambda^2 t) - dilate(u(t))| / max |u_lambda(lambda^2 t)|`
    pub dynamic_mismatch: Option<f64>,
}

fn h_half(u: &RealField) -> f64 {
    let g = u.grid();
    let s: f64 = u
        .spectrum()
        .iter()
        .zip(g.fft_wavenumbers())
        .map(|(c, xi)| xi.abs() * c.norm_sqr())
        .sum();
    (g.length() * s).sqrt()
}

/// Static norm identities of `u_{0, lambda}` and, with `solver`, the
/// comparison of the two evolutions: `u_0` to `t_end` on the original grid,
/// `u_{0, lambda}` to `lambda^2 t_end` with step `lambda^2 dt` on the
/// dilated one.
pub fn scaling_check(
    u0: &RealField,
    lambda: f64,
    eq: &EquationSpec,
    solver: Option<&SolverConfig>,
    max_points: usize,
) -> Result<ScalingReport> {
    let ul = dilate(u0, lambda, max_points)?;
    let l2_error = (ul.norm_l2() / u0.norm_l2() - 1.0).abs();
    let h0 = h_half(u0);
    let h_half_ratio = if h0 > 0.0 { h_half(&ul) / h0 } else { 0.0 };
    let h_half_error = (h_half_ratio - lambda.powf(-0.5)).abs();

    let dynamic_mismatch = match solver {
        None => None,
        Some(cfg) => {
            // amplitude exponent of the invariant rescaling
            let alpha = match eq.kind {
                EquationKind::Mbo => 0.5,
                EquationKind::Bo => 1.0,
                EquationKind::Dnls => {
                    return Err(Error::Parameter("scaling check needs a real equation".into()))
                }
            };
            let a = run(&Field::Real(u0.clone()), eq, cfg)?;
            let scaled = SolverConfig {
                dt: cfg.dt * lambda * lambda,
                t_end: cfg.t_end * lambda * lambda,
                ..*cfg
            };
            let b = run(&Field::Real(dilate_with(u0, lambda, alpha, max_points)?), eq, &scaled)?;
            let ua = a.final_field().as_real().expect("real run");
            let ub = b.final_field().as_real().expect("real run");
            let expected = dilate_with(ua, lambda, alpha, max_points)?;
            let diff = ub.zip_with(&expected, |x, y| x - y)?.max_abs();
            let top = ub.max_abs();
            Some(if top > 0.0 { diff / top } else { diff })
        }
    };
    Ok(ScalingReport { lambda, l2_error, h_half_ratio, h_half_error, dynamic_mismatch })
}
