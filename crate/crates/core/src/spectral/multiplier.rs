use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::{ComplexField, RealField};
use crate::error::{Error, Result};

type Symbol = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A Fourier multiplier `f -> F^{-1}[m(xi) F f]`.
#[derive(Clone)]
pub struct Multiplier {
    name: String,
    symbol: Arc<Symbol>,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn sgn(xi: f64) -> f64 {
    if xi > 0.0 {
        1.0
    } else if xi < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Multiplier {
    pub fn new(name: impl Into<String>, symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Multiplier {
            name: name.into(),
            symbol: Arc::new(symbol),
        }
    }

    pub fn real(name: impl Into<String>, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Multiplier::new(name, move |xi| Complex64::new(symbol(xi), 0.0))
    }

    pub fn identity() -> Self {
        Multiplier::real("I", |_| 1.0)
    }

    /// Hilbert transform, symbol `-i sgn(xi)` with `sgn(0) = 0`.
    pub fn hilbert() -> Self {
        Multiplier::new("H", |xi| -I * sgn(xi))
    }

    /// `d^k/dx^k`, symbol `(i xi)^k`.
    pub fn derivative(order: u32) -> Self {
        Multiplier::new(format!("d^{order}"), move |xi| (I * xi).powu(order))
    }

    /// `D^s`, symbol `|xi|^s`. For `s < 0` the zero mode is annihilated;
    /// `s = 0` is the identity.
    pub fn abs_power(s: f64) -> Self {
        Multiplier::real(format!("D^{s}"), move |xi| {
            if s == 0.0 {
                1.0
            } else if xi == 0.0 {
                0.0
            } else {
                xi.abs().powf(s)
            }
        })
    }

    /// `<D>^s`, symbol `(1 + xi^2)^{s/2}`.
    pub fn bracket_power(s: f64) -> Self {
        Multiplier::real(format!("<D>^{s}"), move |xi| (1.0 + xi * xi).powf(0.5 * s))
    }

    /// Projection onto `xi > 0`; the zero mode gets weight 0.
    pub fn positive() -> Self {
        Multiplier::real("P+", |xi| if xi > 0.0 { 1.0 } else { 0.0 })
    }

    /// Projection onto `xi < 0`; the zero mode gets weight 0.
    pub fn negative() -> Self {
        Multiplier::real("P-", |xi| if xi < 0.0 { 1.0 } else { 0.0 })
    }

    /// Free Schroedinger group `exp(i t d_xx)`, symbol `exp(-i t xi^2)`.
    pub fn schrodinger(t: f64) -> Self {
        Multiplier::new(format!("S({t})"), move |xi| (-I * t * xi * xi).exp())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        (self.symbol)(xi)
    }

    /// Product of symbols (`self` applied after `other`, they commute).
    pub fn then(&self, other: &Multiplier) -> Multiplier {
        let a = self.symbol.clone();
        let b = other.symbol.clone();
        Multiplier {
            name: format!("{}*{}", self.name, other.name),
            symbol: Arc::new(move |xi| a(xi) * b(xi)),
        }
    }

    /// Symbol sampled on `xi` (FFT order), rejecting non-finite values.
    pub fn sample(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        xi.iter()
            .map(|&x| {
                let v = self.eval(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Operator(format!(
                        "multiplier {} is not finite at xi = {x}",
                        self.name
                    )))
                }
            })
            .collect()
    }
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiplier({})", self.name)
    }
}

/// Applies `m` to a complex field.
pub fn apply_multiplier(f: &ComplexField, m: &Multiplier) -> Result<ComplexField> {
    let grid = f.grid().clone();
    let symbol = m.sample(grid.fft_wavenumbers())?;
    let mut spec = f.spectrum();
    for (c, s) in spec.iter_mut().zip(&symbol) {
        *c *= s;
    }
    grid.inverse(&mut spec);
    Ok(ComplexField::from_raw(grid, spec))
}

impl ComplexField {
    pub fn apply(&self, m: &Multiplier) -> Result<ComplexField> {
        apply_multiplier(self, m)
    }
}

impl RealField {
    /// Full complex output of `m` acting on a real field.
    pub fn apply_complex(&self, m: &Multiplier) -> Result<ComplexField> {
        apply_multiplier(&self.to_complex(), m)
    }

    /// Real part of `m f`.
    ///
    /// For conjugate-symmetric symbols this is the exact output on all paired
    /// modes; on the unpaired `-n/2` mode only `Re m` survives, so odd symbols
    /// such as `H` or `d/dx` annihilate it.
    pub fn apply(&self, m: &Multiplier) -> Result<RealField> {
        Ok(self.apply_complex(m)?.real_part())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;
    use std::f64::consts::PI;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn hilbert_maps_cos_to_sin() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        for k in [1.0, 3.0, 17.0] {
            let f = RealField::from_fn(g.clone(), |x| (k * x).cos());
            let h = f.apply(&Multiplier::hilbert()).unwrap();
            let s = RealField::from_fn(g.clone(), |x| (k * x).sin());
            assert!(max_diff(h.samples(), s.samples()) < 1e-13);
        }
    }

    #[test]
    fn bracket_power_on_plane_wave() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let k = 5.0;
        let s = 0.7;
        let f = ComplexField::from_fn(g.clone(), |x| (I * k * x).exp());
        let out = f.apply(&Multiplier::bracket_power(s)).unwrap();
        let factor = (1.0 + k * k).powf(s / 2.0);
        for (o, x) in out.samples().iter().zip(g.coordinates()) {
            assert!((o - factor * (I * k * x).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn non_finite_symbol_is_an_operator_error() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let bad = Multiplier::real("1/xi", |xi| 1.0 / xi);
        let f = RealField::zeros(g);
        assert!(matches!(f.apply(&bad), Err(Error::Operator(_))));
    }

    #[test]
    fn negative_power_kills_mean() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = RealField::from_fn(g, |x| 2.0 + (2.0 * x).cos());
        let out = f.apply(&Multiplier::abs_power(-1.0)).unwrap();
        assert!(out.mean().abs() < 1e-14);
        assert!((out.samples()[0] - 0.5 * (2.0 * -PI).cos()).abs() < 1e-13);
    }
}
