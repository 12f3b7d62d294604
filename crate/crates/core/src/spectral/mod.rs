//! Grids, fields, transforms and Fourier multipliers.

mod dyadic;
mod field;
mod grid;
mod multiplier;
mod primitive;

use std::sync::Arc;

use num_complex::Complex64;

pub use dyadic::{
    check_resolvable, dyadic_project, ladder, partition_defect, phi, psi, Band, DyadicCutoff,
};
pub use field::{lp_norm, ComplexField, Field, RealField};
pub use grid::{Grid, MIN_POINTS};
pub use multiplier::{apply_multiplier, Multiplier};
pub use primitive::{primitive_from_left, primitive_with, Primitive, PrimitiveRule, DEFAULT_DECAY_TOL};

use crate::error::Result;

/// Normalized forward transform of a complex field (FFT order).
pub fn transform(f: &ComplexField) -> Vec<Complex64> {
    f.spectrum()
}

pub fn inverse_transform(grid: Arc<Grid>, spectrum: Vec<Complex64>) -> Result<ComplexField> {
    ComplexField::from_spectrum(grid, spectrum)
}

/// `sum_k |c_k|^2 * L`, the spectral side of Parseval.
pub fn spectral_energy(grid: &Grid, spectrum: &[Complex64]) -> f64 {
    grid.length() * spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>()
}
