//! Run configuration in TOML with five flat sections.
//!
//! ```toml
//! [equation]
//! kind = "mBO"          # BO | mBO | DNLS (required)
//! sign = 1              # +1 or -1
//! nonlinear = true      # false integrates the free flow
//!
//! [grid]
//! n_points = 512        # required
//! length = "64pi"       # required; a number or "<c>pi"
//!
//! [initial]
//! profile = "gaussian"  # gaussian | cosine | random_band | zero | snapshot
//! a = 0.5
//! sigma = 1.0
//! x0 = 0.0
//!
//! [solver]
//! dt = 1e-3             # required
//! t_end = 1.0           # required, a multiple of dt
//! dealias_fraction = 0.6666666666666666
//! snapshot_stride = 1
//!
//! [analysis]
//! scales = [8, 16]
//! shift_k = 3
//! ```
//!
//! The remaining keys and their defaults are listed on [`AnalysisConfig`].
//! Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use bogs::analysis::{EnsembleSpec, ProbeConfig, SlopeConfig, DEFAULT_MAX_POINTS};
use bogs::evolution::{EquationKind, EquationSpec, Sign, SolverConfig};
use bogs::gauge::ResidualMode;
use bogs::spectral::{DyadicCutoff, Grid, MIN_POINTS};
use toml::{Table, Value};

use crate::error::{CliError, ConfigError};

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_points: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Zero,
    Gaussian { a: f64, sigma: f64, x0: f64 },
    Cosine { a: f64, k: f64 },
    /// `seed = None` takes the run seed.
    RandomBand { a: f64, n_min: f64, n_max: f64, seed: Option<u64> },
    Snapshot { path: PathBuf },
}

/// Settings of the analysis commands.
///
/// | key | default | used by |
/// |-----|---------|---------|
/// | `s` | 0.5 | norms |
/// | `scales` | `[8]` | gauge-verify |
/// | `shift_k` | 3 | all projections |
/// | `residual_mode` | `"full"` | gauge-verify (`full` or `free`) |
/// | `probe_samples` | 32 | probe |
/// | `probe_n_points`, `probe_length` | 2048, `"32pi"` | probe |
/// | `probe_t_end`, `probe_time_samples` | 0.5, 129 | probe |
/// | `thetas` | `[0, 0.25, 0.5, 0.75, 1]` | probe |
/// | `slope_thetas` | `[0, 0.5]` | probe |
/// | `slope_n_points`, `slope_length` | 32768, `"64pi"` | probe |
/// | `slope_scales` | `[4, 8, 16, 32, 64, 128]` | probe |
/// | `lambda`, `max_points` | 2, 4194304 | scale |
/// | `ensemble_size` | 20 | prop14 |
/// | `ensemble_amplitude`, `ensemble_band` | `[0.1, 0.5]`, `[1, 4]` | prop14 |
/// | `lp_p`, `lp_samples`, `lp_renormalized` | `[2, 4, 6]`, 32, true | lp-check |
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub s: f64,
    pub scales: Vec<u64>,
    pub cutoff: DyadicCutoff,
    pub residual_mode: ResidualMode,
    /// Seed is filled from the run seed at dispatch.
    pub probe: ProbeConfig,
    pub slope_thetas: Vec<f64>,
    pub slope: SlopeConfig,
    pub lambda: f64,
    pub max_points: usize,
    /// `base_seed` is filled from the run seed at dispatch.
    pub ensemble: EnsembleSpec,
    pub lp_p: Vec<f64>,
    pub lp_samples: usize,
    pub lp_renormalized: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            s: 0.5,
            scales: vec![8],
            cutoff: DyadicCutoff::default(),
            residual_mode: ResidualMode::Full,
            probe: ProbeConfig::default(),
            slope_thetas: vec![0.0, 0.5],
            slope: SlopeConfig::default(),
            lambda: 2.0,
            max_points: DEFAULT_MAX_POINTS,
            ensemble: EnsembleSpec::default(),
            lp_p: vec![2.0, 4.0, 6.0],
            lp_samples: 32,
            lp_renormalized: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub equation: EquationSpec,
    pub grid: GridConfig,
    pub initial: InitialSpec,
    pub solver: SolverConfig,
    pub analysis: AnalysisConfig,
}

/// Keys of one section, consumed as they are read so that leftovers can be
/// reported as unknown.
struct Section {
    name: String,
    table: Table,
}

impl Section {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::new(self.path(key), msg)
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn number(&self, key: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Integer(i) => Ok(*i as f64),
            Value::Float(f) => Ok(*f),
            _ => Err(self.err(key, format!("expected a number, got {}", v.type_str()))),
        }
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| self.number(key, &v)).transpose()
    }

    fn req_f64(&mut self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| self.err(key, "missing required key"))
    }

    fn nonneg_int(&self, key: &str, v: &Value) -> Result<u64> {
        match v {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            Value::Integer(i) => Err(self.err(key, format!("must be non-negative, got {i}"))),
            _ => Err(self.err(key, format!("expected an integer, got {}", v.type_str()))),
        }
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key).map(|v| self.nonneg_int(key, &v)).transpose()
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(v) => Err(self.err(key, format!("expected a boolean, got {}", v.type_str()))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.err(key, format!("expected a string, got {}", v.type_str()))),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<Value>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(v) => Err(self.err(key, format!("expected an array, got {}", v.type_str()))),
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.list(key)? {
            None => Ok(None),
            Some(a) => a.iter().map(|v| self.number(key, v)).collect::<Result<Vec<_>>>().map(Some),
        }
    }

    fn u64_list(&mut self, key: &str) -> Result<Option<Vec<u64>>> {
        match self.list(key)? {
            None => Ok(None),
            Some(a) => a.iter().map(|v| self.nonneg_int(key, v)).collect::<Result<Vec<_>>>().map(Some),
        }
    }

    fn pair(&mut self, key: &str) -> Result<Option<(f64, f64)>> {
        match self.f64_list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 && v[0] <= v[1] => Ok(Some((v[0], v[1]))),
            Some(_) => Err(self.err(key, "expected an ordered pair [lo, hi]")),
        }
    }

    /// A length given as a number or as `"<c>pi"`.
    fn length(&mut self, key: &str) -> Result<Option<f64>> {
        let Some(v) = self.take(key) else {
            return Ok(None);
        };
        let l = match &v {
            Value::String(s) => parse_length(s).ok_or_else(|| {
                self.err(key, format!("cannot read `{s}` as a length (use a number or e.g. \"64pi\")"))
            })?,
            _ => self.number(key, &v)?,
        };
        if !(l.is_finite() && l > 0.0) {
            return Err(self.err(key, format!("must be positive, got {l}")));
        }
        Ok(Some(l))
    }

    fn finish(self) -> Result<()> {
        match self.table.keys().next() {
            Some(k) => Err(self.err(k, "unknown key")),
            None => Ok(()),
        }
    }
}

/// Reads `"64pi"`, `"64*pi"`, `"pi"`, `"2.5 pi"` or a plain number.
pub fn parse_length(s: &str) -> Option<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let (coef, pi) = match t.strip_suffix("pi") {
        Some(c) => (c.strip_suffix('*').unwrap_or(c), true),
        None => (t.as_str(), false),
    };
    let c = if pi && coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
    Some(if pi { c * PI } else { c })
}

fn section(root: &mut Table, name: &str) -> Result<Option<Section>> {
    match root.remove(name) {
        None => Ok(None),
        Some(Value::Table(table)) => Ok(Some(Section { name: name.to_string(), table })),
        Some(v) => Err(ConfigError::new(name, format!("expected a section, got {}", v.type_str()))),
    }
}

fn required_section(root: &mut Table, name: &str) -> Result<Section> {
    section(root, name)?.ok_or_else(|| ConfigError::new(name, "missing required section"))
}

fn empty(name: &str) -> Section {
    Section { name: name.to_string(), table: Table::new() }
}

fn parse_equation(mut sec: Section) -> Result<EquationSpec> {
    let kind = sec.string("kind")?.ok_or_else(|| sec.err("kind", "missing required key"))?;
    let kind = EquationKind::parse(&kind)
        .ok_or_else(|| sec.err("kind", format!("unknown equation `{kind}` (BO, mBO or DNLS)")))?;
    let sign = match sec.f64("sign")? {
        None => Sign::Plus,
        Some(1.0) => Sign::Plus,
        Some(-1.0) => Sign::Minus,
        Some(s) => return Err(sec.err("sign", format!("must be +1 or -1, got {s}"))),
    };
    let mut eq = EquationSpec::new(kind, sign);
    eq.nonlinear = sec.bool("nonlinear")?.unwrap_or(true);
    sec.finish()?;
    Ok(eq)
}

fn parse_grid(mut sec: Section) -> Result<GridConfig> {
    let n = sec.usize("n_points")?.ok_or_else(|| sec.err("n_points", "missing required key"))?;
    if n < MIN_POINTS || n % 2 != 0 {
        return Err(sec.err("n_points", format!("must be even and >= {MIN_POINTS}, got {n}")));
    }
    let length = sec.length("length")?.ok_or_else(|| sec.err("length", "missing required key"))?;
    sec.finish()?;
    Ok(GridConfig { n_points: n, length })
}

fn positive(sec: &Section, key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(sec.err(key, format!("must be positive, got {v}")))
    }
}

fn finite(sec: &Section, key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(sec.err(key, format!("must be finite, got {v}")))
    }
}

fn parse_initial(mut sec: Section) -> Result<InitialSpec> {
    let profile = sec.string("profile")?.unwrap_or_else(|| "gaussian".into());
    let spec = match profile.as_str() {
        "zero" => InitialSpec::Zero,
        "gaussian" => {
            let a = sec.f64("a")?.unwrap_or(0.5);
            let sigma = sec.f64("sigma")?.unwrap_or(1.0);
            let x0 = sec.f64("x0")?.unwrap_or(0.0);
            InitialSpec::Gaussian {
                a: finite(&sec, "a", a)?,
                sigma: positive(&sec, "sigma", sigma)?,
                x0: finite(&sec, "x0", x0)?,
            }
        }
        "cosine" => {
            let a = sec.req_f64("a")?;
            let k = sec.req_f64("k")?;
            InitialSpec::Cosine { a: finite(&sec, "a", a)?, k: finite(&sec, "k", k)? }
        }
        "random_band" => {
            let a = sec.req_f64("a")?;
            let n_min = sec.f64("n_min")?.unwrap_or(0.0);
            let n_max = sec.req_f64("n_max")?;
            if !(n_min >= 0.0 && n_max >= n_min && n_max.is_finite()) {
                return Err(sec.err("n_max", "need 0 <= n_min <= n_max"));
            }
            let seed = sec.u64("seed")?;
            InitialSpec::RandomBand { a: finite(&sec, "a", a)?, n_min, n_max, seed }
        }
        "snapshot" => {
            let path = sec.string("path")?.ok_or_else(|| sec.err("path", "missing required key"))?;
            InitialSpec::Snapshot { path: PathBuf::from(path) }
        }
        other => {
            return Err(sec.err(
                "profile",
                format!("unknown profile `{other}` (gaussian, cosine, random_band, zero, snapshot)"),
            ))
        }
    };
    sec.finish()?;
    Ok(spec)
}

fn parse_solver(mut sec: Section) -> Result<SolverConfig> {
    let d = SolverConfig::default();
    let dt = sec.req_f64("dt")?;
    let t_end = sec.req_f64("t_end")?;
    let cfg = SolverConfig {
        dt: positive(&sec, "dt", dt)?,
        t_end,
        dealias_fraction: sec.f64("dealias_fraction")?.unwrap_or(d.dealias_fraction),
        snapshot_stride: sec.usize("snapshot_stride")?.unwrap_or(d.snapshot_stride),
        stability_constant: sec.f64("stability_constant")?.unwrap_or(d.stability_constant),
        blowup_factor: sec.f64("blowup_factor")?.unwrap_or(d.blowup_factor),
    };
    if !(cfg.t_end.is_finite() && cfg.t_end >= 0.0) {
        return Err(sec.err("t_end", format!("must be >= 0, got {}", cfg.t_end)));
    }
    if !(cfg.dealias_fraction > 0.0 && cfg.dealias_fraction <= 1.0) {
        return Err(sec.err("dealias_fraction", format!("must lie in (0, 1], got {}", cfg.dealias_fraction)));
    }
    if cfg.snapshot_stride == 0 {
        return Err(sec.err("snapshot_stride", "must be >= 1"));
    }
    positive(&sec, "stability_constant", cfg.stability_constant)?;
    if !(cfg.blowup_factor > 1.0 && cfg.blowup_factor.is_finite()) {
        return Err(sec.err("blowup_factor", format!("must exceed 1, got {}", cfg.blowup_factor)));
    }
    cfg.n_steps().map_err(|e| sec.err("t_end", e.to_string()))?;
    sec.finish()?;
    Ok(cfg)
}

fn check_dyadic(sec: &Section, key: &str, scales: &[u64]) -> Result<()> {
    match scales.iter().find(|n| !n.is_power_of_two()) {
        Some(n) => Err(sec.err(key, format!("{n} is not a dyadic scale 2^j"))),
        None => Ok(()),
    }
}

fn check_thetas(sec: &Section, key: &str, thetas: &[f64]) -> Result<()> {
    match thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        Some(t) => Err(sec.err(key, format!("theta must lie in [0, 1], got {t}"))),
        None => Ok(()),
    }
}

fn parse_analysis(mut sec: Section) -> Result<AnalysisConfig> {
    let mut a = AnalysisConfig::default();
    if let Some(s) = sec.f64("s")? {
        if !(s >= 0.5 && s.is_finite()) {
            return Err(sec.err("s", format!("must be >= 1/2, got {s}")));
        }
        a.s = s;
    }
    if let Some(v) = sec.u64_list("scales")? {
        if v.is_empty() {
            return Err(sec.err("scales", "needs at least one scale"));
        }
        check_dyadic(&sec, "scales", &v)?;
        a.scales = v;
    }
    if let Some(k) = sec.u64("shift_k")? {
        let k = u32::try_from(k).map_err(|_| sec.err("shift_k", "out of range"))?;
        a.cutoff = DyadicCutoff::new(k).map_err(|e| sec.err("shift_k", e.to_string()))?;
    }
    if let Some(m) = sec.string("residual_mode")? {
        a.residual_mode = match m.as_str() {
            "full" => ResidualMode::Full,
            "free" => ResidualMode::Free,
            _ => return Err(sec.err("residual_mode", format!("expected `full` or `free`, got `{m}`"))),
        };
    }

    let p = &mut a.probe;
    if let Some(v) = sec.usize("probe_samples")? {
        p.samples = v;
    }
    if let Some(v) = sec.usize("probe_n_points")? {
        p.n_points = v;
    }
    if let Some(v) = sec.length("probe_length")? {
        p.length = v;
    }
    if let Some(v) = sec.f64("probe_t_end")? {
        p.t_end = v;
    }
    if let Some(v) = sec.usize("probe_time_samples")? {
        p.time_samples = v;
    }
    if let Some(v) = sec.f64_list("thetas")? {
        check_thetas(&sec, "thetas", &v)?;
        a.probe.thetas = v;
    }
    if a.probe.n_points < MIN_POINTS || a.probe.n_points % 2 != 0 {
        return Err(sec.err("probe_n_points", format!("must be even and >= {MIN_POINTS}")));
    }
    a.probe.validate().map_err(|e| sec.err("probe_samples", e.to_string()))?;

    if let Some(v) = sec.f64_list("slope_thetas")? {
        check_thetas(&sec, "slope_thetas", &v)?;
        a.slope_thetas = v;
    }
    if let Some(v) = sec.usize("slope_n_points")? {
        if v < MIN_POINTS || v % 2 != 0 {
            return Err(sec.err("slope_n_points", format!("must be even and >= {MIN_POINTS}")));
        }
        a.slope.n_points = v;
    }
    if let Some(v) = sec.length("slope_length")? {
        a.slope.length = v;
    }
    if let Some(v) = sec.u64_list("slope_scales")? {
        if v.len() < 2 {
            return Err(sec.err("slope_scales", "a slope fit needs at least two scales"));
        }
        check_dyadic(&sec, "slope_scales", &v)?;
        a.slope.scales = v;
    }

    if let Some(l) = sec.f64("lambda")? {
        if !(l >= 1.0 && l.is_finite()) {
            return Err(sec.err("lambda", format!("must be >= 1, got {l}")));
        }
        a.lambda = l;
    }
    if let Some(m) = sec.usize("max_points")? {
        a.max_points = m;
    }

    if let Some(n) = sec.usize("ensemble_size")? {
        if n == 0 {
            return Err(sec.err("ensemble_size", "must be >= 1"));
        }
        a.ensemble.count = n;
    }
    if let Some(p) = sec.pair("ensemble_amplitude")? {
        a.ensemble.amp = p;
    }
    if let Some(p) = sec.pair("ensemble_band")? {
        if p.0 < 0.0 {
            return Err(sec.err("ensemble_band", "band edges must be non-negative"));
        }
        a.ensemble.band = p;
    }

    if let Some(v) = sec.f64_list("lp_p")? {
        if let Some(p) = v.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(sec.err("lp_p", format!("exponents must lie in (1, inf), got {p}")));
        }
        a.lp_p = v;
    }
    if let Some(n) = sec.usize("lp_samples")? {
        if n == 0 {
            return Err(sec.err("lp_samples", "must be >= 1"));
        }
        a.lp_samples = n;
    }
    if let Some(b) = sec.bool("lp_renormalized")? {
        a.lp_renormalized = b;
    }
    sec.finish()?;
    Ok(a)
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| {
        ConfigError::new("<document>", e.message().to_string())
    })?;
    let equation = parse_equation(required_section(&mut root, "equation")?)?;
    let grid = parse_grid(required_section(&mut root, "grid")?)?;
    let initial = parse_initial(section(&mut root, "initial")?.unwrap_or_else(|| empty("initial")))?;
    let solver = parse_solver(required_section(&mut root, "solver")?)?;
    let analysis = parse_analysis(section(&mut root, "analysis")?.unwrap_or_else(|| empty("analysis")))?;
    if let Some(k) = root.keys().next() {
        return Err(ConfigError::new(k.as_str(), "unknown section or key"));
    }
    Grid::new(grid.n_points, grid.length).map_err(|e| ConfigError::new("grid", e.to_string()))?;
    Ok(RunConfig { equation, grid, initial, solver, analysis })
}

/// Reads a configuration file; a relative snapshot path is taken relative
/// to the file's directory.
pub fn load_config(path: &Path) -> std::result::Result<(RunConfig, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut cfg = parse_config(&text)?;
    if let InitialSpec::Snapshot { path: p } = &mut cfg.initial {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok((cfg, text))
}
