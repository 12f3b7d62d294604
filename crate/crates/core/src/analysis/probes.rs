use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::norms::{MixedAccumulator, MixedNormSpec};
use crate::error::{Error, Result};
use crate::spectral::{check_resolvable, Band, ComplexField, DyadicCutoff, Grid, Multiplier};

pub const DEFAULT_MIN_SAMPLES: usize = 32;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Free-evolution estimates probed by [`strichartz_probe_suite`] and
/// [`smoothing_slope`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    /// `||e^{it d_xx} phi||_{L_T^{4/theta} L_x^{2/(1-theta)}} / ||phi||_{L^2}`
    Strichartz { theta: f64 },
    /// `||e^{it d_xx} phi||_{L_x^4 L_T^infty} / ||phi||_{H^{1/4} homogeneous}`
    Maximal,
    /// `||<D>^{1/2} e^{it d_xx} phi||_{L_x^infty L_T^2} / ||phi||_{L^2}`
    LocalSmoothing,
    /// `||e^{it d_xx} P_N phi||_{L_x^{2/(1-theta)} L_T^{2/theta}} / ||phi||_{L^2}`
    Smoothing { theta: f64 },
}

impl Estimate {
    pub fn name(&self) -> String {
        match self {
            Estimate::Strichartz { theta } => format!("strichartz(theta={theta})"),
            Estimate::Maximal => "maximal".into(),
            Estimate::LocalSmoothing => "local_smoothing".into(),
            Estimate::Smoothing { theta } => format!("smoothing(theta={theta})"),
        }
    }

    fn norm(&self) -> MixedNormSpec {
        let inv = |x: f64| if x == 0.0 { f64::INFINITY } else { 1.0 / x };
        match *self {
            Estimate::Strichartz { theta } => MixedNormSpec::time_space(4.0 * inv(theta), 2.0 * inv(1.0 - theta)),
            Estimate::Maximal => MixedNormSpec::space_time(4.0, f64::INFINITY),
            Estimate::LocalSmoothing => MixedNormSpec::space_time(f64::INFINITY, 2.0),
            Estimate::Smoothing { theta } => MixedNormSpec::space_time(2.0 * inv(1.0 - theta), 2.0 * inv(theta)),
        }
    }

    fn weight(&self) -> Multiplier {
        match self {
            Estimate::LocalSmoothing => Multiplier::bracket_power(0.5),
            _ => Multiplier::identity(),
        }
    }

    /// Spectral norm of the datum on the right-hand side.
    fn data_norm(&self, grid: &Grid, spec: &[Complex64]) -> f64 {
        let s = match self {
            Estimate::Maximal => 0.25,
            _ => 0.0,
        };
        let sum: f64 = spec
            .iter()
            .zip(grid.fft_wavenumbers())
            .filter(|(_, &xi)| s == 0.0 || xi != 0.0)
            .map(|(c, &xi)| xi.abs().powf(2.0 * s) * c.norm_sqr())
            .sum();
        (grid.length() * sum).sqrt()
    }
}

/// Per-sample ratios of one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub estimate: Estimate,
    /// Sweep values (dyadic `N` for slope probes, empty otherwise).
    pub sweep: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Least-squares slope of `log2 ratio` against `log2 N`.
    pub slope: Option<f64>,
    pub samples: usize,
}

impl ProbeReport {
    /// Largest ratio among the first `k` samples.
    pub fn max_of_first(&self, k: usize) -> f64 {
        self.ratios.iter().take(k).copied().fold(0.0, f64::max)
    }
}

/// Ensemble of random Gaussian wave packets
/// `c exp(i kappa x) exp(-(x - x0)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub n_points: usize,
    pub length: f64,
    /// Final time, inside `(0, 1)`.
    pub t_end: f64,
    pub time_samples: usize,
    pub samples: usize,
    pub min_samples: usize,
    pub seed: u64,
    pub thetas: Vec<f64>,
    pub sigma: (f64, f64),
    pub kappa: (f64, f64),
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            n_points: 2048,
            length: 32.0 * PI,
            t_end: 0.5,
            time_samples: 129,
            samples: DEFAULT_MIN_SAMPLES,
            min_samples: DEFAULT_MIN_SAMPLES,
            seed: 0,
            thetas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            sigma: (0.5, 2.0),
            kappa: (-4.0, 4.0),
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end < 1.0) {
            return Err(Error::Parameter(format!("probe time must lie in (0, 1), got {}", self.t_end)));
        }
        if self.samples < self.min_samples {
            return Err(Error::Parameter(format!(
                "{} samples requested, at least {} required",
                self.samples, self.min_samples
            )));
        }
        if self.time_samples < 2 {
            return Err(Error::Parameter("need at least 2 time samples".into()));
        }
        if let Some(t) = self.thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Parameter(format!("theta must lie in [0, 1], got {t}")));
        }
        if !(self.sigma.0 > 0.0 && self.sigma.0 <= self.sigma.1) {
            return Err(Error::Parameter("sigma range must be positive and ordered".into()));
        }
        Ok(())
    }
}

fn linspace(t_end: f64, m: usize) -> Vec<f64> {
    (0..m).map(|k| t_end * k as f64 / (m - 1) as f64).collect()
}

/// Gaussian packet `exp(i kappa x) exp(-(x - x0)^2 / (2 sigma^2))`.
pub fn free_packet(grid: &Arc<Grid>, kappa: f64, sigma: f64, x0: f64) -> ComplexField {
    ComplexField::from_fn(grid.clone(), |x| {
        (I * kappa * x).exp() * (-(x - x0) * (x - x0) / (2.0 * sigma * sigma)).exp()
    })
}

/// Ratios of several estimates for one datum, sharing the free evolution
/// between estimates with the same spatial weight.
fn ratios_for(grid: &Arc<Grid>, spec: &[Complex64], times: &[f64], estimates: &[Estimate]) -> Result<Vec<f64>> {
    let xi = grid.fft_wavenumbers();
    let mut weights: Vec<(bool, Vec<Complex64>)> = Vec::new();
    let mut which = Vec::with_capacity(estimates.len());
    for e in estimates {
        let key = matches!(e, Estimate::LocalSmoothing);
        let idx = match weights.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                weights.push((key, e.weight().sample(xi)?));
                weights.len() - 1
            }
        };
        which.push(idx);
    }
    let mut accs = estimates
        .iter()
        .map(|e| MixedAccumulator::new(e.norm(), times, grid.n_points(), grid.dx()))
        .collect::<Result<Vec<_>>>()?;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    let mut moduli = vec![Vec::new(); weights.len()];
    for &t in times {
        for ((_, w), m) in weights.iter().zip(moduli.iter_mut()) {
            for ((b, c), (wk, &k)) in buf.iter_mut().zip(spec).zip(w.iter().zip(xi)) {
                *b = c * wk * (-I * t * k * k).exp();
            }
            grid.inverse(&mut buf);
            *m = buf.iter().map(|c| c.norm()).collect();
        }
        for (acc, &i) in accs.iter_mut().zip(&which) {
            acc.push(&moduli[i]);
        }
    }
    estimates
        .iter()
        .zip(&accs)
        .map(|(e, acc)| {
            let d = e.data_norm(grid, spec);
            let lhs = acc.finish()?;
            Ok(if d > 0.0 { lhs / d } else { 0.0 })
        })
        .collect()
}

/// Strichartz (one report per theta), maximal-function and local-smoothing
/// ratios over a seeded packet ensemble. Sample `i` depends only on
/// `(seed, i)`, so larger ensembles extend smaller ones.
pub fn strichartz_probe_suite(cfg: &ProbeConfig) -> Result<Vec<ProbeReport>> {
    cfg.validate()?;
    let grid = Grid::new(cfg.n_points, cfg.length)?;
    let times = linspace(cfg.t_end, cfg.time_samples);
    let mut estimates: Vec<Estimate> = cfg.thetas.iter().map(|&theta| Estimate::Strichartz { theta }).collect();
    estimates.push(Estimate::Maximal);
    estimates.push(Estimate::LocalSmoothing);

    let per_sample = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let sigma = rng.gen_range(cfg.sigma.0..=cfg.sigma.1);
            let kappa = rng.gen_range(cfg.kappa.0..=cfg.kappa.1);
            let x0 = rng.gen_range(-cfg.length / 8.0..=cfg.length / 8.0);
            let c = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
            let phi = free_packet(&grid, kappa, sigma, x0).scale(c);
            ratios_for(&grid, &phi.spectrum(), &times, &estimates)
        })
        .collect::<Result<Vec<_>>>()?;

    estimates
        .iter()
        .enumerate()
        .map(|(k, &estimate)| {
            let ratios: Vec<f64> = per_sample.iter().map(|r| r[k]).collect();
            if let Some(bad) = ratios.iter().find(|r| !r.is_finite()) {
                return Err(Error::Operator(format!("{}: non-finite ratio {bad}", estimate.name())));
            }
            Ok(ProbeReport {
                estimate,
                sweep: Vec::new(),
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                samples: ratios.len(),
                ratios,
                slope: None,
            })
        })
        .collect()
}

/// Dyadically localized packets `P_N(exp(i N x) g)` with a fixed envelope
/// `g`, launched near the left edge so the packet stays inside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeConfig {
    pub n_points: usize,
    pub length: f64,
    pub t_end: f64,
    pub sigma: f64,
    pub scales: Vec<u64>,
    /// Time samples per unit travel of one envelope width.
    pub samples_per_width: f64,
    pub min_time_samples: usize,
}

impl Default for SlopeConfig {
    fn default() -> Self {
        SlopeConfig {
            n_points: 32768,
            length: 64.0 * PI,
            t_end: 0.5,
            sigma: 1.0,
            scales: vec![4, 8, 16, 32, 64, 128],
            samples_per_width: 8.0,
            min_time_samples: 33,
        }
    }
}

/// Ratios of the dyadic smoothing estimate across `scales` and the fitted
/// growth exponent in `N`.
pub fn smoothing_slope(cfg: &SlopeConfig, theta: f64, cutoff: &DyadicCutoff) -> Result<ProbeReport> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Parameter(format!("theta must lie in [0, 1], got {theta}")));
    }
    if !(cfg.t_end > 0.0 && cfg.t_end < 1.0) {
        return Err(Error::Parameter(format!("probe time must lie in (0, 1), got {}", cfg.t_end)));
    }
    if cfg.scales.len() < 2 {
        return Err(Error::InsufficientData("slope fit needs at least two scales".into()));
    }
    let grid = Grid::new(cfg.n_points, cfg.length)?;
    let x0 = -cfg.length / 2.0 + cfg.length / 8.0;
    let estimate = Estimate::Smoothing { theta };
    let mut ratios = Vec::with_capacity(cfg.scales.len());
    for &n in &cfg.scales {
        check_resolvable(&grid, n)?;
        let travel = 2.0 * n as f64 * cfg.t_end;
        if x0 + travel + 4.0 * cfg.sigma > cfg.length / 2.0 {
            return Err(Error::Parameter(format!(
                "packet at N = {n} leaves the domain before T = {}",
                cfg.t_end
            )));
        }
        // group velocity 2N, envelope width sigma
        let m = ((cfg.samples_per_width * 2.0 * n as f64 * cfg.t_end / cfg.sigma).ceil() as usize + 1)
            .max(cfg.min_time_samples);
        let times = linspace(cfg.t_end, m);
        let phi = free_packet(&grid, n as f64, cfg.sigma, x0);
        let spec = phi.spectrum();
        let block = cutoff.sample(&grid, Band::Block(n))?;
        let projected: Vec<Complex64> = spec.iter().zip(&block).map(|(c, b)| c * b).collect();
        let lhs = ratios_for(&grid, &projected, &times, &[estimate])?[0];
        // ratios_for divides by ||P_N phi||; rescale to ||phi||
        let pn: f64 = projected.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let full: f64 = spec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        ratios.push(lhs * pn / full);
    }
    let sweep: Vec<f64> = cfg.scales.iter().map(|&n| n as f64).collect();
    let slope = fit_slope(&sweep, &ratios);
    Ok(ProbeReport {
        estimate,
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        samples: ratios.len(),
        sweep,
        ratios,
        slope: Some(slope),
    })
}

/// Least-squares slope of `log2 y` against `log2 x`.
fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.log2()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
