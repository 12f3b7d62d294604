//! Command implementations. Each command computes everything first and
//! returns its artifacts; files are written by the caller.

use std::fmt;
use std::str::FromStr;

use bogs::analysis::{
    mixed_norm, scaling_check, smoothing_slope, spacetime_l2_ensemble, square_function_probe,
    strichartz_probe_suite, x_norm, y_norm, Estimate, MixedNormSpec, ProbeReport,
};
use bogs::evolution::{run, Trajectory};
use bogs::gauge::{gauge_residual, GaugeConfig};
use bogs::invariants::{drift_report, ConservationReport};
use bogs::profiles::Profile;
use bogs::spectral::{check_resolvable, Field, Grid, RealField};

use crate::config::{InitialSpec, RunConfig};
use crate::error::{CliError, ConfigError};
use crate::report::{num, Artifact, Table};
use crate::snapshot::{encode, read_snapshot, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    GaugeVerify,
    Conserve,
    Norms,
    Probe,
    LpCheck,
    Prop14,
    Scale,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Simulate,
        Command::GaugeVerify,
        Command::Conserve,
        Command::Norms,
        Command::Probe,
        Command::LpCheck,
        Command::Prop14,
        Command::Scale,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::GaugeVerify => "gauge-verify",
            Command::Conserve => "conserve",
            Command::Norms => "norms",
            Command::Probe => "probe",
            Command::LpCheck => "lp-check",
            Command::Prop14 => "prop14",
            Command::Scale => "scale",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::UnknownCommand(s.to_string()))
    }
}

/// Artifacts plus human-readable notes of one command.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name.as_os_str() == name)
    }
}

/// The initial datum described by `cfg`, with `seed` standing in for an
/// unset random-band seed.
pub fn initial_field(cfg: &RunConfig, seed: u64) -> Result<Field, CliError> {
    let grid = Grid::new(cfg.grid.n_points, cfg.grid.length)?;
    let real = match &cfg.initial {
        InitialSpec::Zero => RealField::zeros(grid),
        InitialSpec::Gaussian { a, sigma, x0 } => {
            Profile::Gaussian { a: *a, sigma: *sigma, x0: *x0 }.sample(&grid)?
        }
        InitialSpec::Cosine { a, k } => Profile::Cosine { a: *a, k: *k }.sample(&grid)?,
        InitialSpec::RandomBand { a, n_min, n_max, seed: s } => Profile::RandomBand {
            a: *a,
            n_min: *n_min,
            n_max: *n_max,
            seed: s.unwrap_or(seed),
        }
        .sample(&grid)?,
        InitialSpec::Snapshot { path } => {
            let snap = read_snapshot(path)?;
            let g = snap.field.grid();
            let same_length = (g.length() - cfg.grid.length).abs() <= 1e-12 * cfg.grid.length;
            if g.n_points() != cfg.grid.n_points || !same_length {
                return Err(ConfigError::new(
                    "initial.path",
                    format!(
                        "snapshot grid ({} points, length {}) differs from [grid] ({} points, length {})",
                        g.n_points(),
                        g.length(),
                        cfg.grid.n_points,
                        cfg.grid.length
                    ),
                )
                .into());
            }
            return match (snap.field, cfg.equation.kind.is_real()) {
                (Field::Complex(_), true) => Err(ConfigError::new(
                    "initial.path",
                    format!("complex snapshot cannot seed the real equation {}", cfg.equation.kind),
                )
                .into()),
                (Field::Real(u), false) => Ok(Field::Complex(u.to_complex())),
                (f, _) => Ok(f),
            };
        }
    };
    Ok(if cfg.equation.kind.is_real() { Field::Real(real) } else { Field::Complex(real.to_complex()) })
}

fn simulate_trajectory(cfg: &RunConfig, seed: u64, out: &mut Outcome) -> Result<Trajectory, CliError> {
    let u0 = initial_field(cfg, seed)?;
    let traj = run(&u0, &cfg.equation, &cfg.solver)?;
    out.warnings.extend(traj.diagnostics.iter().cloned());
    Ok(traj)
}

/// `time` plus every reported functional, one row per snapshot.
pub fn conservation_table(r: &ConservationReport) -> Table {
    let mut cols: Vec<(&str, &Vec<f64>)> = vec![("mean_mass", &r.mean_mass), ("l2_mass", &r.l2_mass)];
    if let Some(h) = &r.hamiltonian {
        cols.push(("hamiltonian", h));
    }
    if let Some(e) = &r.bo_energy {
        cols.push(("bo_energy", e));
    }
    let mut header = vec!["time"];
    header.extend(cols.iter().map(|c| c.0));
    let mut t = Table::new(&header);
    for (i, time) in r.times.iter().enumerate() {
        let mut row = vec![num(*time)];
        row.extend(cols.iter().map(|c| num(c.1[i])));
        t.push(row);
    }
    t
}

fn drift_table(r: &ConservationReport) -> Table {
    let mut t = Table::new(&["functional", "initial", "final", "relative_drift"]);
    let series: Vec<(&str, &Vec<f64>)> = [
        Some(("mean_mass", &r.mean_mass)),
        Some(("l2_mass", &r.l2_mass)),
        r.hamiltonian.as_ref().map(|h| ("hamiltonian", h)),
        r.bo_energy.as_ref().map(|e| ("bo_energy", e)),
    ]
    .into_iter()
    .flatten()
    .collect();
    for (name, s) in series {
        t.push(vec![
            name.to_string(),
            num(s[0]),
            num(*s.last().expect("non-empty")),
            num(bogs::invariants::relative_drift(s)),
        ]);
    }
    t
}

fn simulate(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let traj = simulate_trajectory(cfg, seed, &mut out)?;
    let report = drift_report(&traj)?;
    for (i, (t, f)) in traj.times.iter().zip(&traj.snapshots).enumerate() {
        let snap = Snapshot { equation: traj.equation, time: *t, field: f.clone() };
        let bytes = encode(&snap).map_err(|source| CliError::Snapshot {
            path: format!("snapshots/snap-{i:06}.bogs").into(),
            source,
        })?;
        out.artifacts.push(Artifact::bytes(format!("snapshots/snap-{i:06}.bogs"), bytes));
    }
    out.artifacts.push(Artifact::csv("conservation.csv", conservation_table(&report)));
    out.summary.push(format!("{} snapshots up to t = {}", traj.len(), num(traj.duration())));
    for (name, d) in report.drifts() {
        out.summary.push(format!("{name} relative drift {}", num(d)));
    }
    Ok(out)
}

fn conserve(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let traj = simulate_trajectory(cfg, seed, &mut out)?;
    let report = drift_report(&traj)?;
    out.artifacts.push(Artifact::csv("conservation.csv", conservation_table(&report)));
    out.artifacts.push(Artifact::csv("drift.csv", drift_table(&report)));
    for (name, d) in report.drifts() {
        out.summary.push(format!("{name} relative drift {}", num(d)));
    }
    Ok(out)
}

fn gauge_verify(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let grid = Grid::new(cfg.grid.n_points, cfg.grid.length)?;
    for &n in &cfg.analysis.scales {
        check_resolvable(&grid, n)?;
    }
    let mut out = Outcome::default();
    let traj = simulate_trajectory(cfg, seed, &mut out)?;
    let gcfg = GaugeConfig { cutoff: cfg.analysis.cutoff, ..GaugeConfig::default() };
    let mut summary = Table::new(&[
        "N",
        "interior_snapshots",
        "rms_residual",
        "max_residual",
        "unimodularity_error",
        "boundary_mismatch",
    ]);
    for &n in &cfg.analysis.scales {
        let r = gauge_residual(&traj, n, &gcfg, cfg.analysis.residual_mode)?;
        let mut t = Table::new(&["time", "residual", "v_norm"]);
        for ((time, res), vn) in r.times.iter().zip(&r.residual).zip(&r.v_norm) {
            t.push(vec![num(*time), num(*res), num(*vn)]);
        }
        let max = r.residual.iter().copied().fold(0.0, f64::max);
        summary.push(vec![
            n.to_string(),
            r.times.len().to_string(),
            num(r.rms()),
            num(max),
            num(r.unimodularity_error),
            num(r.boundary_mismatch),
        ]);
        out.summary.push(format!("N = {n}: rms residual {}, unimodularity {}", num(r.rms()), num(r.unimodularity_error)));
        out.warnings.extend(r.warnings.iter().map(|w| format!("N = {n}: {w}")));
        out.artifacts.push(Artifact::csv(format!("gauge_N{n}.csv"), t));
    }
    out.artifacts.push(Artifact::csv("gauge_summary.csv", summary));
    Ok(out)
}

/// Mixed norms reported by `norms`, as `(label, spec)`.
pub fn reported_mixed_norms() -> Vec<(&'static str, MixedNormSpec)> {
    let inf = f64::INFINITY;
    vec![
        ("L2x_L2t", MixedNormSpec::space_time(2.0, 2.0)),
        ("L4x_Linft", MixedNormSpec::space_time(4.0, inf)),
        ("L2x_Linft", MixedNormSpec::space_time(2.0, inf)),
        ("Linfx_L2t", MixedNormSpec::space_time(inf, 2.0)),
        ("Linft_L2x", MixedNormSpec::time_space(inf, 2.0)),
        ("L4t_Linfx", MixedNormSpec::time_space(4.0, inf)),
    ]
}

fn norms(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let traj = simulate_trajectory(cfg, seed, &mut out)?;
    let mut t = Table::new(&["norm", "value"]);
    let x = x_norm(&traj, cfg.analysis.s, &cfg.analysis.cutoff)?;
    let y = y_norm(&traj)?;
    let rows = [
        ("x_energy", x.energy),
        ("x_smoothing", x.smoothing),
        ("x_maximal_l2", x.maximal_l2),
        ("x_maximal_l4", x.maximal_l4),
        ("x_total", x.total()),
        ("y_energy", y.energy),
        ("y_smoothing", y.smoothing),
        ("y_maximal_l2", y.maximal_l2),
        ("y_maximal_l4", y.maximal_l4),
        ("y_total", y.total()),
    ];
    for (name, v) in rows {
        t.push(vec![name.to_string(), num(v)]);
    }
    for (name, spec) in reported_mixed_norms() {
        t.push(vec![name.to_string(), num(mixed_norm(&traj, spec)?)]);
    }
    out.summary.push(format!("X^{} norm {}, Y norm {}", cfg.analysis.s, num(x.total()), num(y.total())));
    out.artifacts.push(Artifact::csv("norms.csv", t));
    Ok(out)
}

fn theta_of(e: &Estimate) -> String {
    match e {
        Estimate::Strichartz { theta } | Estimate::Smoothing { theta } => num(*theta),
        _ => String::new(),
    }
}

fn kind_of(e: &Estimate) -> &'static str {
    match e {
        Estimate::Strichartz { .. } => "strichartz",
        Estimate::Maximal => "maximal",
        Estimate::LocalSmoothing => "local_smoothing",
        Estimate::Smoothing { .. } => "smoothing",
    }
}

fn probe(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let pcfg = bogs::analysis::ProbeConfig { seed, ..cfg.analysis.probe.clone() };
    let reports = strichartz_probe_suite(&pcfg)?;
    let mut ratios = Table::new(&["estimate", "theta", "sample", "ratio"]);
    let mut summary = Table::new(&["estimate", "theta", "samples", "max_ratio", "max_ratio_first_min_samples"]);
    for r in &reports {
        for (i, v) in r.ratios.iter().enumerate() {
            ratios.push(vec![kind_of(&r.estimate).into(), theta_of(&r.estimate), i.to_string(), num(*v)]);
        }
        summary.push(vec![
            kind_of(&r.estimate).into(),
            theta_of(&r.estimate),
            r.samples.to_string(),
            num(r.max_ratio),
            num(r.max_of_first(pcfg.min_samples)),
        ]);
        out.summary.push(format!("{}: max ratio {}", r.estimate.name(), num(r.max_ratio)));
    }
    let mut slope_rows = Table::new(&["theta", "N", "ratio"]);
    let mut slopes = Table::new(&["theta", "slope", "expected_slope"]);
    let slope_reports: Vec<ProbeReport> = cfg
        .analysis
        .slope_thetas
        .iter()
        .map(|&th| smoothing_slope(&cfg.analysis.slope, th, &cfg.analysis.cutoff))
        .collect::<Result<_, _>>()?;
    for (r, &th) in slope_reports.iter().zip(&cfg.analysis.slope_thetas) {
        for (n, v) in r.sweep.iter().zip(&r.ratios) {
            slope_rows.push(vec![num(th), num(*n), num(*v)]);
        }
        let s = r.slope.unwrap_or(f64::NAN);
        slopes.push(vec![num(th), num(s), num(0.5 - th)]);
        out.summary.push(format!("smoothing slope at theta = {th}: {} (expected {})", num(s), num(0.5 - th)));
    }
    out.artifacts.push(Artifact::csv("probe_ratios.csv", ratios));
    out.artifacts.push(Artifact::csv("probe_summary.csv", summary));
    out.artifacts.push(Artifact::csv("smoothing_ratios.csv", slope_rows));
    out.artifacts.push(Artifact::csv("smoothing_slopes.csv", slopes));
    Ok(out)
}

fn lp_check(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let grid = Grid::new(cfg.grid.n_points, cfg.grid.length)?;
    let a = &cfg.analysis;
    let reports = square_function_probe(&grid, &a.lp_p, a.lp_samples, seed, &a.cutoff, a.lp_renormalized)?;
    let mut rows = Table::new(&["p", "sample", "ratio"]);
    let mut summary = Table::new(&["p", "renormalized", "samples", "min_ratio", "max_ratio"]);
    for r in &reports {
        for (i, v) in r.ratios.iter().enumerate() {
            rows.push(vec![num(r.p), i.to_string(), num(*v)]);
        }
        summary.push(vec![
            num(r.p),
            r.renormalized.to_string(),
            r.ratios.len().to_string(),
            num(r.min_ratio),
            num(r.max_ratio),
        ]);
        out.summary.push(format!("p = {}: ratio in [{}, {}]", r.p, num(r.min_ratio), num(r.max_ratio)));
    }
    out.artifacts.push(Artifact::csv("lp_ratios.csv", rows));
    out.artifacts.push(Artifact::csv("lp_summary.csv", summary));
    Ok(out)
}

fn prop14(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let grid = Grid::new(cfg.grid.n_points, cfg.grid.length)?;
    let spec = bogs::analysis::EnsembleSpec { base_seed: seed, ..cfg.analysis.ensemble };
    let rows = spacetime_l2_ensemble(&grid, &cfg.equation, &cfg.solver, &cfg.analysis.cutoff, &spec)?;
    let mut t = Table::new(&["seed", "lhs", "rhs", "ratio"]);
    for r in &rows {
        t.push(vec![r.seed.to_string(), num(r.result.lhs), num(r.result.rhs), num(r.result.ratio)]);
    }
    let max = rows.iter().map(|r| r.result.ratio).fold(0.0, f64::max);
    out.summary.push(format!("{} runs, max lhs/rhs {}", rows.len(), num(max)));
    out.artifacts.push(Artifact::csv("prop14.csv", t));
    Ok(out)
}

fn scale(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let u0 = initial_field(cfg, seed)?;
    let u0 = u0
        .as_real()
        .ok_or_else(|| ConfigError::new("equation.kind", "the scaling check needs a real equation"))?;
    let r = scaling_check(u0, cfg.analysis.lambda, &cfg.equation, Some(&cfg.solver), cfg.analysis.max_points)?;
    let mut t = Table::new(&["lambda", "l2_error", "h_half_ratio", "h_half_error", "dynamic_mismatch"]);
    let dynamic = r.dynamic_mismatch.map(num).unwrap_or_default();
    t.push(vec![num(r.lambda), num(r.l2_error), num(r.h_half_ratio), num(r.h_half_error), dynamic.clone()]);
    out.summary.push(format!(
        "lambda = {}: L2 error {}, H^1/2 error {}, dynamic mismatch {}",
        r.lambda,
        num(r.l2_error),
        num(r.h_half_error),
        dynamic
    ));
    out.artifacts.push(Artifact::csv("scaling.csv", t));
    Ok(out)
}

/// Runs `cmd` on a validated configuration.
pub fn dispatch(cmd: Command, cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    match cmd {
        Command::Simulate => simulate(cfg, seed),
        Command::GaugeVerify => gauge_verify(cfg, seed),
        Command::Conserve => conserve(cfg, seed),
        Command::Norms => norms(cfg, seed),
        Command::Probe => probe(cfg, seed),
        Command::LpCheck => lp_check(cfg, seed),
        Command::Prop14 => prop14(cfg, seed),
        Command::Scale => scale(cfg, seed),
    }
}
