//! Named initial-condition profiles.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `a exp(-(x - x0)^2 / (2 sigma^2))`
    Gaussian { a: f64, sigma: f64, x0: f64 },
    /// `a cos(k x)`; `k` should be a grid wavenumber for periodicity.
    Cosine { a: f64, k: f64 },
    /// Random phases and amplitudes on `n_min <= |xi| <= n_max`, scaled to
    /// `max |u| = a`.
    RandomBand {
        a: f64,
        n_min: f64,
        n_max: f64,
        seed: u64,
    },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match *self {
            Profile::Gaussian { a, sigma, x0 } => {
                if !(a.is_finite() && x0.is_finite()) {
                    return bad("gaussian: a and x0 must be finite");
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad("gaussian: sigma must be positive");
                }
            }
            Profile::Cosine { a, k } => {
                if !(a.is_finite() && k.is_finite()) {
                    return bad("cosine: a and k must be finite");
                }
            }
            Profile::RandomBand { a, n_min, n_max, .. } => {
                if !a.is_finite() {
                    return bad("random_band: a must be finite");
                }
                if !(n_min >= 0.0 && n_max >= n_min && n_max.is_finite()) {
                    return bad("random_band: need 0 <= n_min <= n_max");
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, grid: &Arc<Grid>) -> Result<RealField> {
        self.validate()?;
        match *self {
            Profile::Gaussian { a, sigma, x0 } => Ok(RealField::from_fn(grid.clone(), |x| {
                a * (-(x - x0) * (x - x0) / (2.0 * sigma * sigma)).exp()
            })),
            Profile::Cosine { a, k } => Ok(RealField::from_fn(grid.clone(), |x| a * (k * x).cos())),
            Profile::RandomBand { a, n_min, n_max, seed } => {
                random_band(grid, a, n_min, n_max, &mut ChaCha8Rng::seed_from_u64(seed))
            }
        }
    }
}

/// Real field with random spectrum on `n_min <= |xi| <= n_max`, excluding
/// the unpaired mode, normalized to `max |u| = a`.
pub fn random_band(grid: &Arc<Grid>, a: f64, n_min: f64, n_max: f64, rng: &mut impl Rng) -> Result<RealField> {
    let n = grid.n_points();
    let xi = grid.fft_wavenumbers();
    let nyq = grid.nyquist_index();
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let mut any = false;
    for k in 0..=n / 2 - 1 {
        let w = xi[k].abs();
        if w < n_min - 1e-12 || w > n_max + 1e-12 {
            continue;
        }
        let amp: f64 = rng.gen_range(0.2..1.0);
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        let c = Complex64::from_polar(amp, phase);
        if k == 0 {
            spec[0] = Complex64::new(amp * phase.cos(), 0.0);
        } else {
            spec[k] = c;
            spec[n - k] = c.conj();
        }
        any = true;
    }
    debug_assert_eq!(spec[nyq], Complex64::new(0.0, 0.0));
    if !any {
        return Err(Error::Config(format!(
            "random_band: no grid wavenumber in [{n_min}, {n_max}]"
        )));
    }
    let f = RealField::from_spectrum(grid.clone(), spec)?;
    let m = f.max_abs();
    Ok(if m > 0.0 { f.scale(a / m) } else { f })
}

/// Sum of a low band `|xi| <= N / 2^k` and a high band `N/2 <= |xi| <= 2N`,
/// each with peak amplitude `a`: the frequencies sit on the flat parts of
/// `P_{<<N}` and of the fattened block around `N`.
pub fn scale_separated(grid: &Arc<Grid>, a: f64, n: u64, shift_k: u32, rng: &mut impl Rng) -> Result<RealField> {
    let n = n as f64;
    let lo = random_band(grid, a, 0.0, n / f64::from(1u32 << shift_k), rng)?;
    let hi = random_band(grid, a, n / 2.0, 2.0 * n, rng)?;
    lo.zip_with(&hi, |x, y| x + y)
}
