use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Smallest grid accepted by [`Grid::new`].
pub const MIN_POINTS: usize = 8;

/// Uniform periodic grid on `[-length/2, length/2)`.
///
/// Wavenumbers are stored in FFT order (`0, 1, .., n/2-1, -n/2, .., -1` in
/// units of `2 pi / length`); [`Grid::wavenumbers`] returns them ascending.
pub struct Grid {
    n_points: usize,
    length: f64,
    dx: f64,
    origin: f64,
    xi: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(n_points: usize, length: f64) -> Result<Arc<Grid>> {
        if n_points < MIN_POINTS || !n_points.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_points must be even and >= {MIN_POINTS}, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        let half = (n_points / 2) as i64;
        let xi = (0..n_points as i64)
            .map(|k| {
                let j = if k < half { k } else { k - n_points as i64 };
                2.0 * PI * j as f64 / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n_points,
            length,
            dx: length / n_points as f64,
            origin: -0.5 * length,
            xi,
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
        }))
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Left boundary of the periodic cell.
    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.dx
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Wavenumbers in FFT storage order.
    pub fn fft_wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    /// Wavenumbers `2 pi j / L` for `j = -n/2 .. n/2 - 1`, ascending.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let h = self.n_points / 2;
        self.xi[h..].iter().chain(self.xi[..h].iter()).copied().collect()
    }

    /// Storage index of the unpaired `-n/2` mode.
    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    /// Largest resolvable `|xi|`, attained only by the unpaired mode.
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n_points as f64 / self.length
    }

    /// Signed integer mode number of storage index `k`.
    pub fn mode_index(&self, k: usize) -> i64 {
        let h = self.n_points / 2;
        if k < h {
            k as i64
        } else {
            k as i64 - self.n_points as i64
        }
    }

    /// Same number of points and length.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points && self.length == other.length
    }

    /// Normalized forward transform: `c_k = (1/n) sum_j f_j exp(-2 pi i j k / n)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n_points);
        self.forward.process(data);
        let scale = 1.0 / self.n_points as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// Inverse of [`Grid::forward`].
    pub fn inverse(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n_points);
        self.inverse.process(data);
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points)
            .field("length", &self.length)
            .field("dx", &self.dx)
            .finish()
    }
}

/// Checks that two grids agree, for binary operations on fields.
pub(crate) fn ensure_same(a: &Grid, b: &Grid) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}
