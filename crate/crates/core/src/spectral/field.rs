use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{ensure_same, Grid};
use crate::error::{Error, Result};

/// Real samples on a [`Grid`].
#[derive(Debug, Clone)]
pub struct RealField {
    grid: Arc<Grid>,
    samples: Vec<f64>,
}

/// Complex samples on a [`Grid`].
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<Grid>,
    samples: Vec<Complex64>,
}

/// Either kind of field, used where the equation decides the sample type.
#[derive(Debug, Clone)]
pub enum Field {
    Real(RealField),
    Complex(ComplexField),
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.n_points() {
        return Err(Error::GridMismatch(format!(
            "{len} samples for a grid of {} points",
            grid.n_points()
        )));
    }
    Ok(())
}

impl RealField {
    pub fn new(grid: Arc<Grid>, samples: Vec<f64>) -> Result<Self> {
        check_len(&grid, samples.len())?;
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Operator(format!("non-finite sample at index {j}")));
        }
        Ok(RealField { grid, samples })
    }

    /// Builds a field without the finiteness scan; callers guarantee it.
    pub(crate) fn from_raw(grid: Arc<Grid>, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.n_points());
        RealField { grid, samples }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n_points();
        RealField::from_raw(grid, vec![0.0; n])
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        RealField::from_raw(grid, samples)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_raw(
            self.grid.clone(),
            self.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Normalized Fourier coefficients in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.forward(&mut buf);
        buf
    }

    /// Real part of the field synthesized from `spectrum`.
    pub fn from_spectrum(grid: Arc<Grid>, mut spectrum: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, spectrum.len())?;
        grid.inverse(&mut spectrum);
        RealField::new(grid, spectrum.into_iter().map(|c| c.re).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_raw(self.grid.clone(), self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(RealField::from_raw(
            self.grid.clone(),
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, c: f64) -> RealField {
        self.map(|v| c * v)
    }

    /// Periodic trapezoidal integral `dx * sum f_j`.
    pub fn integral(&self) -> f64 {
        self.grid.dx() * self.samples.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn norm_l2(&self) -> f64 {
        (self.grid.dx() * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn norm_lp(&self, p: f64) -> f64 {
        lp_norm(self.samples.iter().map(|v| v.abs()), self.grid.dx(), p)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Reflection `x -> -x` about the grid centre, pairing index `j` with `n - j`.
    pub fn reflect(&self) -> RealField {
        let n = self.samples.len();
        let samples = (0..n).map(|j| self.samples[(n - j) % n]).collect();
        RealField::from_raw(self.grid.clone(), samples)
    }
}

impl ComplexField {
    pub fn new(grid: Arc<Grid>, samples: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, samples.len())?;
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Operator(format!("non-finite sample at index {j}")));
        }
        Ok(ComplexField { grid, samples })
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.n_points());
        ComplexField { grid, samples }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n_points();
        ComplexField::from_raw(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        ComplexField::from_raw(grid, samples)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        self.grid.forward(&mut buf);
        buf
    }

    pub fn from_spectrum(grid: Arc<Grid>, mut spectrum: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, spectrum.len())?;
        grid.inverse(&mut spectrum);
        ComplexField::new(grid, spectrum)
    }

    pub fn real_part(&self) -> RealField {
        RealField::from_raw(self.grid.clone(), self.samples.iter().map(|c| c.re).collect())
    }

    pub fn imag_part(&self) -> RealField {
        RealField::from_raw(self.grid.clone(), self.samples.iter().map(|c| c.im).collect())
    }

    pub fn modulus(&self) -> RealField {
        RealField::from_raw(self.grid.clone(), self.samples.iter().map(|c| c.norm()).collect())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexField {
        ComplexField::from_raw(self.grid.clone(), self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexField> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(ComplexField::from_raw(
            self.grid.clone(),
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Pointwise product with a real field.
    pub fn mul_real(&self, other: &RealField) -> Result<ComplexField> {
        ensure_same(&self.grid, other.grid())?;
        Ok(ComplexField::from_raw(
            self.grid.clone(),
            self.samples
                .iter()
                .zip(other.samples())
                .map(|(&a, &b)| a * b)
                .collect(),
        ))
    }

    pub fn scale(&self, c: Complex64) -> ComplexField {
        self.map(|v| c * v)
    }

    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.grid.dx()
    }

    pub fn norm_l2(&self) -> f64 {
        (self.grid.dx() * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn norm_lp(&self, p: f64) -> f64 {
        lp_norm(self.samples.iter().map(|v| v.norm()), self.grid.dx(), p)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

impl Field {
    pub fn grid(&self) -> &Arc<Grid> {
        match self {
            Field::Real(f) => f.grid(),
            Field::Complex(f) => f.grid(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Field::Real(_))
    }

    pub fn as_real(&self) -> Option<&RealField> {
        match self {
            Field::Real(f) => Some(f),
            Field::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&ComplexField> {
        match self {
            Field::Real(_) => None,
            Field::Complex(f) => Some(f),
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        match self {
            Field::Real(f) => f.to_complex(),
            Field::Complex(f) => f.clone(),
        }
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        match self {
            Field::Real(f) => f.spectrum(),
            Field::Complex(f) => f.spectrum(),
        }
    }

    pub fn modulus(&self) -> RealField {
        match self {
            Field::Real(f) => f.map(f64::abs),
            Field::Complex(f) => f.modulus(),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        match self {
            Field::Real(f) => f.norm_l2(),
            Field::Complex(f) => f.norm_l2(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Field::Real(f) => f.max_abs(),
            Field::Complex(f) => f.max_abs(),
        }
    }
}

impl From<RealField> for Field {
    fn from(f: RealField) -> Self {
        Field::Real(f)
    }
}

impl From<ComplexField> for Field {
    fn from(f: ComplexField) -> Self {
        Field::Complex(f)
    }
}

/// Discrete `L^p` norm with uniform weight `h`; `p = inf` is the maximum.
pub fn lp_norm(values: impl Iterator<Item = f64>, h: f64, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 2.0 {
        (h * values.map(|v| v * v).sum::<f64>()).sqrt()
    } else {
        (h * values.map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}
