use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norms::norm_bands;
use crate::error::{Error, Result};
use crate::profiles::random_band;
use crate::spectral::{lp_norm, DyadicCutoff, Grid, RealField};

/// `(sum_N |P_N f|^2)^{1/2}` over `P_0` and the resolvable ladder. With
/// `renormalized`, each symbol is divided by `(sum_M m_M^2)^{1/2}`, so the
/// squared symbols sum to 1 and the `L^2` norm is preserved exactly.
pub fn square_function(f: &RealField, cutoff: &DyadicCutoff, renormalized: bool) -> Result<RealField> {
    let grid = f.grid().clone();
    let bands = norm_bands(&grid);
    let symbols = bands
        .iter()
        .map(|&b| cutoff.sample(&grid, b))
        .collect::<Result<Vec<_>>>()?;
    let scale: Vec<f64> = (0..grid.n_points())
        .map(|k| {
            if renormalized {
                let s: f64 = symbols.iter().map(|m| m[k] * m[k]).sum();
                if s > 0.0 { 1.0 / s.sqrt() } else { 0.0 }
            } else {
                1.0
            }
        })
        .collect();
    let spec = f.spectrum();
    let mut acc = vec![0.0; grid.n_points()];
    for m in &symbols {
        let mut s: Vec<_> = spec.iter().enumerate().map(|(k, c)| c * m[k] * scale[k]).collect();
        grid.inverse(&mut s);
        for (a, c) in acc.iter_mut().zip(&s) {
            *a += c.re * c.re;
        }
    }
    RealField::new(grid, acc.into_iter().map(f64::sqrt).collect())
}

/// `||S f||_p / ||f||_p`; 0 for `f = 0`.
pub fn square_function_ratio(f: &RealField, p: f64, cutoff: &DyadicCutoff, renormalized: bool) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("square-function exponent must lie in (1, inf), got {p}")));
    }
    let s = square_function(f, cutoff, renormalized)?;
    let dx = f.grid().dx();
    let den = lp_norm(f.samples().iter().map(|v| v.abs()), dx, p);
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(lp_norm(s.samples().iter().copied(), dx, p) / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareFunctionReport {
    pub p: f64,
    pub renormalized: bool,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Ratios over `samples` seeded random fields, each with a random band
/// inside `[0, K/2]`, `K` the largest grid wavenumber.
pub fn square_function_probe(
    grid: &Arc<Grid>,
    ps: &[f64],
    samples: usize,
    seed: u64,
    cutoff: &DyadicCutoff,
    renormalized: bool,
) -> Result<Vec<SquareFunctionReport>> {
    let top = grid.max_wavenumber() / 2.0;
    let dk = 2.0 * std::f64::consts::PI / grid.length();
    let fields = (0..samples as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let a = rng.gen_range(0.0..top);
            let b = rng.gen_range(0.0..top);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            random_band(grid, 1.0, lo, hi.max(lo + dk), &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    ps.iter()
        .map(|&p| {
            let ratios = fields
                .iter()
                .map(|f| square_function_ratio(f, p, cutoff, renormalized))
                .collect::<Result<Vec<_>>>()?;
            Ok(SquareFunctionReport {
                p,
                renormalized,
                min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                ratios,
            })
        })
        .collect()
}
