use num_complex::Complex64;

use super::field::RealField;

/// Default relative boundary-decay tolerance.
pub const DEFAULT_DECAY_TOL: f64 = 1e-8;

/// Quadrature used for the left-anchored primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrimitiveRule {
    /// Mean times `(x - x_left)` plus the periodic spectral antiderivative of
    /// the mean-free part; exact for trigonometric polynomials.
    #[default]
    Spectral,
    /// Cumulative trapezoidal rule.
    Trapezoid,
}

/// `F(x) = int_{x_left}^x f`, with a boundary-decay diagnostic.
#[derive(Debug, Clone)]
pub struct Primitive {
    pub field: RealField,
    /// Set when `|f|` at either boundary exceeds `decay_tol * max |f|`.
    pub decay_warning: Option<String>,
}

pub fn primitive_from_left(f: &RealField) -> Primitive {
    primitive_with(f, PrimitiveRule::default(), DEFAULT_DECAY_TOL)
}

pub fn primitive_with(f: &RealField, rule: PrimitiveRule, decay_tol: f64) -> Primitive {
    let grid = f.grid().clone();
    let n = grid.n_points();
    let s = f.samples();
    let peak = f.max_abs();
    let edge = s[0].abs().max(s[n - 1].abs());
    let decay_warning = if peak > 0.0 && edge > decay_tol * peak {
        let msg = format!(
            "integrand not decayed at the boundary: |f| = {edge:.3e} vs max {peak:.3e}"
        );
        log::warn!("{msg}");
        Some(msg)
    } else {
        None
    };

    let samples = match rule {
        PrimitiveRule::Trapezoid => {
            let h = grid.dx();
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(n);
            out.push(0.0);
            for j in 1..n {
                acc += 0.5 * h * (s[j - 1] + s[j]);
                out.push(acc);
            }
            out
        }
        PrimitiveRule::Spectral => {
            let mut spec = f.spectrum();
            let mean = spec[0].re;
            let nyq = grid.nyquist_index();
            for (k, (c, &xi)) in spec.iter_mut().zip(grid.fft_wavenumbers()).enumerate() {
                *c = if k == 0 || k == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    *c / Complex64::new(0.0, xi)
                };
            }
            grid.inverse(&mut spec);
            let g0 = spec[0].re;
            spec.iter()
                .enumerate()
                .map(|(j, c)| mean * (j as f64 * grid.dx()) + c.re - g0)
                .collect()
        }
    };
    Primitive {
        field: RealField::from_raw(grid, samples),
        decay_warning,
    }
}
