use std::sync::Arc;

use num_complex::Complex64;

use super::equation::{EquationKind, EquationSpec};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{ComplexField, Field, Grid, RealField};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub dealias_fraction: f64,
    pub snapshot_stride: usize,
    /// Warn when `dt > stability_constant * dx / max|u|`.
    pub stability_constant: f64,
    /// Abort when `max|u|` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            t_end: 1.0,
            dealias_fraction: 2.0 / 3.0,
            snapshot_stride: 1,
            stability_constant: 1.0,
            blowup_factor: 1e6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be >= 1".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::Config("blowup_factor must exceed 1".into()));
        }
        Ok(())
    }

    /// Number of steps from 0 to `t_end`; `t_end` must be a multiple of `dt`.
    pub fn n_steps(&self) -> Result<usize> {
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(Error::Config(format!(
                "t_end = {} is not an integer multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }
}

/// Dispersion relation `omega(xi)` with `hat u_t = -i omega hat u` for the free flow.
///
/// For the real equations the symbol is odd, so the unpaired `-n/2` mode is
/// given `omega = 0` to keep the propagator real and unitary.
pub fn dispersion(grid: &Grid, kind: EquationKind) -> Vec<f64> {
    let nyq = grid.nyquist_index();
    grid.fft_wavenumbers()
        .iter()
        .enumerate()
        .map(|(k, &xi)| match kind {
            EquationKind::Dnls => xi * xi,
            _ if k == nyq => 0.0,
            _ => xi * xi.abs(),
        })
        .collect()
}

fn phases(omega: &[f64], t: f64) -> Vec<Complex64> {
    omega.iter().map(|&w| (-I * (w * t)).exp()).collect()
}

/// Exact free propagation `S(t) f`: `exp(-t H d_xx)` for BO/mBO,
/// `exp(i t d_xx)` for DNLS.
pub fn linear_propagate(f: &Field, t: f64, kind: EquationKind) -> Result<Field> {
    let grid = f.grid().clone();
    let factors = phases(&dispersion(&grid, kind), t);
    let mut spec = f.spectrum();
    for (c, e) in spec.iter_mut().zip(&factors) {
        *c *= e;
    }
    match (f, kind.is_real()) {
        (Field::Real(_), true) => Ok(RealField::from_spectrum(grid, spec)?.into()),
        _ => Ok(ComplexField::from_spectrum(grid, spec)?.into()),
    }
}

/// Keep-mask of the dealiasing filter: modes with `|j| <= fraction * n / 2`.
pub fn dealias_mask(grid: &Grid, fraction: f64) -> Vec<bool> {
    let limit = fraction * (grid.n_points() / 2) as f64 + 1e-9;
    (0..grid.n_points())
        .map(|k| (grid.mode_index(k).unsigned_abs() as f64) <= limit)
        .collect()
}

/// Spectral evaluation of the nonlinear term for a fixed grid.
pub(crate) struct NonlinearTerm {
    grid: Arc<Grid>,
    eq: EquationSpec,
    /// `i xi` with the unpaired mode zeroed for the real equations.
    ik: Vec<Complex64>,
    mask: Vec<bool>,
}

impl NonlinearTerm {
    pub(crate) fn new(grid: Arc<Grid>, eq: EquationSpec, dealias_fraction: f64) -> Self {
        let nyq = grid.nyquist_index();
        let ik = grid
            .fft_wavenumbers()
            .iter()
            .enumerate()
            .map(|(k, &xi)| {
                if eq.kind.is_real() && k == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    I * xi
                }
            })
            .collect();
        let mask = dealias_mask(&grid, dealias_fraction);
        NonlinearTerm { grid, eq, ik, mask }
    }

    /// Spectrum of the right-hand side contribution `-s N(u)` given `hat u`.
    pub(crate) fn eval(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let n = spec.len();
        if !self.eq.nonlinear {
            return vec![Complex64::new(0.0, 0.0); n];
        }
        let s = self.eq.sign.value();
        let real = self.eq.kind.is_real();
        let mut u = spec.to_vec();
        self.grid.inverse(&mut u);
        if real {
            for v in u.iter_mut() {
                v.im = 0.0;
            }
        }
        let mut out = match self.eq.kind {
            EquationKind::Bo => {
                let mut sq: Vec<Complex64> = u.iter().map(|v| Complex64::new(v.re * v.re, 0.0)).collect();
                self.grid.forward(&mut sq);
                sq.iter().zip(&self.ik).map(|(c, ik)| c * ik).collect::<Vec<_>>()
            }
            EquationKind::Mbo | EquationKind::Dnls => {
                let mut ux: Vec<Complex64> = spec.iter().zip(&self.ik).map(|(c, ik)| c * ik).collect();
                self.grid.inverse(&mut ux);
                let mut prod: Vec<Complex64> = u
                    .iter()
                    .zip(&ux)
                    .map(|(v, d)| {
                        if real {
                            Complex64::new(v.re * v.re * d.re, 0.0)
                        } else {
                            v.norm_sqr() * d
                        }
                    })
                    .collect();
                self.grid.forward(&mut prod);
                prod
            }
        };
        for (c, &keep) in out.iter_mut().zip(&self.mask) {
            *c = if keep { -s * *c } else { Complex64::new(0.0, 0.0) };
        }
        out
    }
}

/// `-s u^2 u_x` (mBO), `-s (u^2)_x` (BO) or `-s |u|^2 u_x` (DNLS), dealiased.
pub fn nonlinear_rhs(f: &Field, eq: &EquationSpec, dealias_fraction: f64) -> Result<Field> {
    let grid = f.grid().clone();
    let term = NonlinearTerm::new(grid.clone(), *eq, dealias_fraction);
    let out = term.eval(&f.spectrum());
    if eq.kind.is_real() {
        Ok(RealField::from_spectrum(grid, out)?.into())
    } else {
        Ok(ComplexField::from_spectrum(grid, out)?.into())
    }
}

/// Solver state: time and field.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub field: Field,
}

/// Integrating-factor RK4 for a fixed grid, equation and step.
pub(crate) struct Stepper {
    term: NonlinearTerm,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    dt: f64,
}

impl Stepper {
    pub(crate) fn new(grid: Arc<Grid>, eq: EquationSpec, dt: f64, dealias_fraction: f64) -> Self {
        let omega = dispersion(&grid, eq.kind);
        Stepper {
            full: phases(&omega, dt),
            half: phases(&omega, 0.5 * dt),
            term: NonlinearTerm::new(grid, eq, dealias_fraction),
            dt,
        }
    }

    fn propagate(factors: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        v.iter().zip(factors).map(|(a, e)| a * e).collect()
    }

    /// Advances `hat u` by one step of size `dt`.
    pub(crate) fn advance(&self, u: &[Complex64]) -> Vec<Complex64> {
        let h = self.dt;
        let (e1, e2) = (&self.full, &self.half);
        let k1 = self.term.eval(u);
        let a: Vec<_> = u.iter().zip(&k1).map(|(u, k)| u + 0.5 * h * k).collect();
        let k2 = self.term.eval(&Self::propagate(e2, &a));
        let eu = Self::propagate(e2, u);
        let b: Vec<_> = eu.iter().zip(&k2).map(|(u, k)| u + 0.5 * h * k).collect();
        let k3 = self.term.eval(&b);
        let c: Vec<_> = eu.iter().zip(&k3).map(|(u, k)| u + h * k).collect();
        let k4 = self.term.eval(&Self::propagate(e2, &c));
        (0..u.len())
            .map(|j| {
                e1[j] * (u[j] + h / 6.0 * k1[j]) + e2[j] * (h / 3.0) * (k2[j] + k3[j]) + h / 6.0 * k4[j]
            })
            .collect()
    }
}

fn check_state(grid: &Grid, spec: &[Complex64], real: bool) -> (f64, f64, bool) {
    let mut u = spec.to_vec();
    grid.inverse(&mut u);
    let mut max = 0.0f64;
    let mut imag = 0.0f64;
    let mut finite = true;
    for v in &u {
        if !v.is_finite() {
            finite = false;
        }
        if real {
            max = max.max(v.re.abs());
            imag = imag.max(v.im.abs());
        } else {
            max = max.max(v.norm());
        }
    }
    (max, imag, finite)
}

fn prepare(u0: &Field, eq: &EquationSpec) -> Result<Field> {
    match (u0, eq.kind.is_real()) {
        (Field::Real(_), true) | (Field::Complex(_), false) => Ok(u0.clone()),
        (Field::Real(f), false) => Ok(f.to_complex().into()),
        (Field::Complex(_), true) => Err(Error::Parameter(format!(
            "{} acts on real fields, got a complex initial datum",
            eq.kind
        ))),
    }
}

fn to_field(grid: &Arc<Grid>, spec: Vec<Complex64>, real: bool) -> Result<Field> {
    if real {
        Ok(RealField::from_spectrum(grid.clone(), spec)?.into())
    } else {
        Ok(ComplexField::from_spectrum(grid.clone(), spec)?.into())
    }
}

fn stability_warning(grid: &Grid, max_u: f64, cfg: &SolverConfig) -> Option<String> {
    if max_u > 0.0 && cfg.dt > cfg.stability_constant * grid.dx() / max_u {
        let msg = format!(
            "dt = {} exceeds stability heuristic {:.3e} (C = {})",
            cfg.dt,
            cfg.stability_constant * grid.dx() / max_u,
            cfg.stability_constant
        );
        log::warn!("{msg}");
        Some(msg)
    } else {
        None
    }
}

/// One integrating-factor RK4 step.
pub fn step(state: &State, eq: &EquationSpec, cfg: &SolverConfig) -> Result<State> {
    cfg.validate()?;
    let field = prepare(&state.field, eq)?;
    let grid = field.grid().clone();
    stability_warning(&grid, field.max_abs(), cfg);
    let stepper = Stepper::new(grid.clone(), *eq, cfg.dt, cfg.dealias_fraction);
    let next = stepper.advance(&field.spectrum());
    let t = state.t + cfg.dt;
    let (_, _, finite) = check_state(&grid, &next, eq.kind.is_real());
    if !finite {
        return Err(Error::BlowUp {
            time: t,
            last_valid_time: state.t,
            reason: "non-finite values".into(),
        });
    }
    Ok(State {
        t,
        field: to_field(&grid, next, eq.kind.is_real())?,
    })
}

/// Integrates from `t = 0` to `cfg.t_end`, storing every `snapshot_stride`-th state.
pub fn run(u0: &Field, eq: &EquationSpec, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let n_steps = cfg.n_steps()?;
    let u0 = prepare(u0, eq)?;
    let grid = u0.grid().clone();
    let real = eq.kind.is_real();
    let initial_max = u0.max_abs();
    let mut diagnostics = Vec::new();
    if let Some(w) = stability_warning(&grid, initial_max, cfg) {
        diagnostics.push(w);
    }
    if n_steps % cfg.snapshot_stride != 0 {
        diagnostics.push(format!(
            "{n_steps} steps is not a multiple of snapshot_stride {}; last snapshot at t = {}",
            cfg.snapshot_stride,
            (n_steps / cfg.snapshot_stride * cfg.snapshot_stride) as f64 * cfg.dt
        ));
    }

    let stepper = Stepper::new(grid.clone(), *eq, cfg.dt, cfg.dealias_fraction);
    let mut spec = u0.spectrum();
    let mut times = vec![0.0];
    let mut snapshots = vec![u0];
    let mut max_imag = 0.0f64;
    let mut warned = false;
    for k in 1..=n_steps {
        spec = stepper.advance(&spec);
        let t = k as f64 * cfg.dt;
        let (max_u, imag, finite) = check_state(&grid, &spec, real);
        let last_valid_time = (k - 1) as f64 * cfg.dt;
        if !finite {
            return Err(Error::BlowUp {
                time: t,
                last_valid_time,
                reason: "non-finite values".into(),
            });
        }
        if initial_max > 0.0 && max_u > cfg.blowup_factor * initial_max {
            return Err(Error::BlowUp {
                time: t,
                last_valid_time,
                reason: format!("max|u| = {max_u:.3e} exceeds {} x initial", cfg.blowup_factor),
            });
        }
        if !warned {
            if let Some(w) = stability_warning(&grid, max_u, cfg) {
                diagnostics.push(format!("t = {t}: {w}"));
                warned = true;
            }
        }
        if k % cfg.snapshot_stride == 0 {
            max_imag = max_imag.max(imag);
            times.push(t);
            snapshots.push(to_field(&grid, spec.clone(), real)?);
        }
    }
    Ok(Trajectory {
        equation: *eq,
        grid,
        dt: cfg.dt,
        snapshot_stride: cfg.snapshot_stride,
        dealias_fraction: cfg.dealias_fraction,
        times,
        snapshots,
        max_imag_residue: max_imag,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bo_type_propagator_on_plane_wave() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let k = 3.0;
        let t = 0.37;
        let f: Field = ComplexField::from_fn(g.clone(), |x| (I * k * x).exp()).into();
        let out = linear_propagate(&f, t, EquationKind::Mbo).unwrap();
        let exact = ComplexField::from_fn(g, |x| (I * (k * x - k * k * t)).exp());
        let err = out
            .as_complex()
            .unwrap()
            .zip_with(&exact, |a, b| a - b)
            .unwrap()
            .max_abs();
        assert!(err < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let g = Grid::new(32, 8.0).unwrap();
        let f = RealField::from_fn(g, |x| (-x * x).exp());
        let out = linear_propagate(&f.clone().into(), 0.0, EquationKind::Bo).unwrap();
        let out = out.as_real().unwrap();
        for (a, b) in out.samples().iter().zip(f.samples()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_field_has_zero_rhs() {
        let g = Grid::new(32, 8.0).unwrap();
        let f: Field = RealField::from_fn(g, |_| 0.7).into();
        for eq in [EquationSpec::mbo(), EquationSpec::bo()] {
            let r = nonlinear_rhs(&f, &eq, 2.0 / 3.0).unwrap();
            assert!(r.max_abs() < 1e-15);
        }
    }

    #[test]
    fn dealias_removes_high_modes() {
        let g = Grid::new(96, 2.0 * PI).unwrap();
        // 2/3 of Nyquist is mode 32
        let f: Field = RealField::from_fn(g.clone(), |x| (32.0 * x).cos()).into();
        let r = nonlinear_rhs(&f, &EquationSpec::mbo(), 2.0 / 3.0).unwrap();
        let spec = r.spectrum();
        for (k, c) in spec.iter().enumerate() {
            if g.mode_index(k).abs() > 32 {
                assert!(c.norm() < 1e-15, "mode {} = {c}", g.mode_index(k));
            }
        }
        let mask = dealias_mask(&g, 1.0);
        assert!(mask.iter().all(|&m| m));
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid::new(32, 8.0).unwrap();
        let s = State {
            t: 0.0,
            field: RealField::zeros(g).into(),
        };
        let next = step(&s, &EquationSpec::mbo(), &SolverConfig::default()).unwrap();
        assert_eq!(next.field.max_abs(), 0.0);
        assert!((next.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SolverConfig { dealias_fraction: 1.5, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig { dt: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig { t_end: 1.00005, ..Default::default() };
        assert!(cfg.n_steps().is_err());
    }

    #[test]
    fn complex_datum_rejected_for_real_equation() {
        let g = Grid::new(16, 8.0).unwrap();
        let f: Field = ComplexField::zeros(g).into();
        assert!(run(&f, &EquationSpec::mbo(), &SolverConfig::default()).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let f: Field = RealField::from_fn(g, |x| 50.0 * x.cos()).into();
        let cfg = SolverConfig {
            dt: 0.5,
            t_end: 50.0,
            blowup_factor: 10.0,
            ..SolverConfig::default()
        };
        match run(&f, &EquationSpec::mbo(), &cfg) {
            Err(Error::BlowUp { last_valid_time, time, .. }) => assert!(last_valid_time < time),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
