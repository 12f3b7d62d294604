//! Littlewood-Paley cutoffs on the grid.
//!
//! `psi` is the smooth bump equal to 1 on `|xi| <= 1` and 0 on `|xi| >= 2`,
//! `phi(xi) = psi(xi) - psi(2 xi)`, `P_N` has symbol `phi(xi / N)` for
//! dyadic `N >= 1` and `P_0` has symbol `psi(2 xi)`. On a grid whose
//! largest wavenumber is `K`, the ladder `1, 2, .., N_max` with
//! `N_max >= K` telescopes to `1 - psi(2 xi)`, so the blocks sum to the
//! identity up to rounding.

use super::field::{ComplexField, RealField};
use super::grid::Grid;
use super::multiplier::Multiplier;
use crate::error::{Error, Result};

fn chi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth even plateau bump: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`.
pub fn psi(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let num = chi(2.0 - a);
        num / (num + chi(a - 1.0))
    }
}

/// Annulus bump `psi(xi) - psi(2 xi)`, supported in `1/2 < |xi| < 2`.
pub fn phi(xi: f64) -> f64 {
    psi(xi) - psi(2.0 * xi)
}

/// Frequency selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// `P_0`
    Zero,
    /// `P_N`, `N = 2^j`
    Block(u64),
    /// `P_{<<N}`: blocks `M <= N / 2^shift_k`, always including `P_0`
    Low(u64),
    /// `P_{<~N}`: blocks `M <= N`, including `P_0`
    UpTo(u64),
    /// `P~_N = P_{N/2} + P_N + P_{2N}` (with `P_{1/2}` read as `P_0`)
    Fattened(u64),
    /// `P_{>=1} = I - P_0`
    AboveOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicCutoff {
    shift_k: u32,
}

impl Default for DyadicCutoff {
    fn default() -> Self {
        DyadicCutoff { shift_k: 3 }
    }
}

pub(crate) fn check_dyadic(n: u64) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Parameter(format!("{n} is not a dyadic scale 2^j")));
    }
    Ok(())
}

/// `N` is resolvable when the annulus `N/2 < |xi|` meets the grid.
pub fn check_resolvable(grid: &Grid, n: u64) -> Result<()> {
    check_dyadic(n)?;
    let k = grid.max_wavenumber();
    if (n as f64) < 2.0 * k {
        Ok(())
    } else {
        Err(Error::Scale {
            scale: n,
            max_wavenumber: k,
        })
    }
}

/// Every resolvable dyadic scale `1, 2, .., N_max` on `grid`.
pub fn ladder(grid: &Grid) -> Vec<u64> {
    let k = grid.max_wavenumber();
    let mut out = vec![1u64];
    while ((out[out.len() - 1] * 2) as f64) < 2.0 * k {
        let next = out[out.len() - 1] * 2;
        out.push(next);
    }
    out
}

impl DyadicCutoff {
    pub fn new(shift_k: u32) -> Result<Self> {
        if shift_k == 0 || shift_k > 30 {
            return Err(Error::Parameter(format!("shift_k must be in 1..=30, got {shift_k}")));
        }
        Ok(DyadicCutoff { shift_k })
    }

    pub fn shift_k(&self) -> u32 {
        self.shift_k
    }

    pub fn symbol(&self, band: Band, xi: f64) -> f64 {
        match band {
            Band::Zero => psi(2.0 * xi),
            Band::Block(n) => phi(xi / n as f64),
            Band::Low(n) => {
                let top = n >> self.shift_k;
                if top >= 1 {
                    psi(xi / top as f64)
                } else {
                    psi(2.0 * xi)
                }
            }
            Band::UpTo(n) => psi(xi / n as f64),
            Band::Fattened(n) => {
                if n == 1 {
                    psi(xi / 2.0)
                } else {
                    let n = n as f64;
                    psi(xi / (2.0 * n)) - psi(4.0 * xi / n)
                }
            }
            Band::AboveOne => 1.0 - psi(2.0 * xi),
        }
    }

    pub fn multiplier(&self, band: Band) -> Multiplier {
        let cut = *self;
        Multiplier::real(format!("{band:?}"), move |xi| cut.symbol(band, xi))
    }

    fn validate(&self, grid: &Grid, band: Band) -> Result<()> {
        match band {
            Band::Zero | Band::AboveOne => Ok(()),
            Band::Block(n) | Band::Low(n) | Band::UpTo(n) | Band::Fattened(n) => {
                check_resolvable(grid, n)
            }
        }
    }

    /// Samples the band's symbol on the grid (FFT order).
    pub fn sample(&self, grid: &Grid, band: Band) -> Result<Vec<f64>> {
        self.validate(grid, band)?;
        Ok(grid
            .fft_wavenumbers()
            .iter()
            .map(|&xi| self.symbol(band, xi))
            .collect())
    }

    pub fn project_real(&self, f: &RealField, band: Band) -> Result<RealField> {
        self.validate(f.grid(), band)?;
        f.apply(&self.multiplier(band))
    }

    pub fn project_complex(&self, f: &ComplexField, band: Band) -> Result<ComplexField> {
        self.validate(f.grid(), band)?;
        f.apply(&self.multiplier(band))
    }

    /// All ladder blocks `P_0, P_1, .., P_{N_max}` of `f`, in order.
    pub fn decompose(&self, f: &RealField) -> Vec<(Band, RealField)> {
        let grid = f.grid().clone();
        let spec = f.spectrum();
        std::iter::once(Band::Zero)
            .chain(ladder(&grid).into_iter().map(Band::Block))
            .map(|band| {
                let mut s: Vec<_> = spec
                    .iter()
                    .zip(grid.fft_wavenumbers())
                    .map(|(&c, &xi)| c * self.symbol(band, xi))
                    .collect();
                grid.inverse(&mut s);
                let block = RealField::from_raw(grid.clone(), s.into_iter().map(|c| c.re).collect());
                (band, block)
            })
            .collect()
    }
}

/// `P_band f` for a real field using `cutoff`.
pub fn dyadic_project(f: &RealField, band: Band, cutoff: &DyadicCutoff) -> Result<RealField> {
    cutoff.project_real(f, band)
}

/// `sup_xi |phi_0 + sum_N phi_N - 1|` over the grid.
pub fn partition_defect(grid: &Grid) -> f64 {
    let cut = DyadicCutoff::default();
    let scales = ladder(grid);
    grid.fft_wavenumbers()
        .iter()
        .map(|&xi| {
            let total: f64 = cut.symbol(Band::Zero, xi)
                + scales.iter().map(|&n| cut.symbol(Band::Block(n), xi)).sum::<f64>();
            (total - 1.0).abs()
        })
        .fold(0.0, f64::max)
}
