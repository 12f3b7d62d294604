use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::norms::{spacetime_l2, x_norm_spectra, Spectra};
use crate::error::{Error, Result};
use crate::evolution::{run, EquationSpec, SolverConfig, Trajectory};
use crate::profiles::random_band;
use crate::spectral::{Band, DyadicCutoff, Field, Grid, Multiplier, RealField};

/// Both sides of `||(u^2)_x||_{L^2_{xT}} <~ ||P_{>=1} u_0||^2_{H^{1/2}}
/// + T^{1/2} ||u||_X^2 + (1 + ||u||_X) ||u||_X ||P_{>=1} u||_X`, `X = X_T^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimeL2 {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, and 0 when both vanish.
    pub ratio: f64,
    pub x_norm: f64,
    pub x_norm_high: f64,
    pub data_term: f64,
}

/// Evaluates both sides on an existing real trajectory.
pub fn spacetime_l2_terms(traj: &Trajectory, cutoff: &DyadicCutoff) -> Result<SpacetimeL2> {
    let snaps = traj
        .real_snapshots()
        .ok_or_else(|| Error::Parameter("the space-time L^2 check needs real snapshots".into()))?;
    let d = Multiplier::derivative(1);
    let u2x = snaps
        .iter()
        .map(|u| Ok(Field::Real(u.map(|v| v * v).apply(&d)?)))
        .collect::<Result<Vec<_>>>()?;
    let lhs = spacetime_l2(&Trajectory::from_snapshots(traj.equation, traj.times.clone(), u2x)?)?;

    let high = traj.map(|f| {
        let u = f.as_real().expect("checked real");
        Ok(Field::Real(cutoff.project_real(u, Band::AboveOne)?))
    })?;
    let x = x_norm_spectra(&Spectra::new(traj)?, 0.5, cutoff)?.total();
    let xh = x_norm_spectra(&Spectra::new(&high)?, 0.5, cutoff)?.total();

    let u0h = high.snapshots[0].as_real().expect("real");
    let xi = u0h.grid().fft_wavenumbers();
    let data_term = u0h.grid().length()
        * u0h
            .spectrum()
            .iter()
            .zip(xi)
            .map(|(c, k)| (1.0 + k * k).sqrt() * c.norm_sqr())
            .sum::<f64>();
    let t = traj.duration();
    let rhs = data_term + t.sqrt() * x * x + (1.0 + x) * x * xh;
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SpacetimeL2 { lhs, rhs, ratio, x_norm: x, x_norm_high: xh, data_term })
}

/// Runs the flow from `u0` and evaluates both sides.
pub fn spacetime_l2_check(
    u0: &RealField,
    eq: &EquationSpec,
    cfg: &SolverConfig,
    cutoff: &DyadicCutoff,
) -> Result<SpacetimeL2> {
    let traj = run(&Field::Real(u0.clone()), eq, cfg)?;
    spacetime_l2_terms(&traj, cutoff)
}

/// Random initial data for the ensemble: amplitude in `amp`, band `[0, K]`
/// with `K` drawn from `band`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub amp: (f64, f64),
    pub band: (f64, f64),
    pub base_seed: u64,
    pub count: usize,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec { amp: (0.1, 0.5), band: (1.0, 4.0), base_seed: 0, count: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleRow {
    pub seed: u64,
    pub amplitude: f64,
    pub band_max: f64,
    pub result: SpacetimeL2,
}

/// Initial datum of ensemble member `seed`.
pub fn ensemble_member(grid: &Arc<Grid>, spec: &EnsembleSpec, seed: u64) -> Result<(f64, f64, RealField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(spec.amp.0..=spec.amp.1);
    let k = rng.gen_range(spec.band.0..=spec.band.1);
    Ok((a, k, random_band(grid, a, 0.0, k, &mut rng)?))
}

/// Seeds `base_seed .. base_seed + count`, evaluated in parallel and
/// returned in seed order. Member `i` does not depend on `count`, so a
/// larger ensemble extends a smaller one.
pub fn spacetime_l2_ensemble(
    grid: &Arc<Grid>,
    eq: &EquationSpec,
    cfg: &SolverConfig,
    cutoff: &DyadicCutoff,
    spec: &EnsembleSpec,
) -> Result<Vec<EnsembleRow>> {
    (0..spec.count as u64)
        .into_par_iter()
        .map(|i| {
            let seed = spec.base_seed + i;
            let (amplitude, band_max, u0) = ensemble_member(grid, spec, seed)?;
            let result = spacetime_l2_check(&u0, eq, cfg, cutoff)?;
            Ok(EnsembleRow { seed, amplitude, band_max, result })
        })
        .collect()
}
