//! Frequency-localized gauge transform.
//!
//! For a dyadic `N` and real `u`, with `low = P_{<<N} u`, `w = P_+ P_N u` and
//! `F(x) = int_{x_left}^x low^2`, the gauged field is `v_N = exp(-iF/2) w`.
//! Writing the real flow as `u_t + H u_xx = G` (for mBO, `G = -s u^2 u_x`),
//! `v_N` satisfies `(d_t - i d_xx) v_N = A_1 + .. + A_5` with
//!
//! ```text
//! A_1 = e (P_+ P_N G - low^2 P_+ P_N u_x)
//! A_2 = e P_{<<N}(iH - 1) u_x * low * w
//! A_3 = -i e w int^x H P_{<<N} u_x * P_{<<N} u_x
//! A_4 = -i e w int^x P_{<<N} G * low
//! A_5 = (i/4) e low^4 w
//! ```
//!
//! where `e = exp(-iF/2)`. The only inputs from the flow are `G` and the
//! identity `H P_+ = -i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{EquationKind, NonlinearTerm, Sign, Trajectory};
use crate::spectral::{
    check_resolvable, primitive_with, Band, ComplexField, DyadicCutoff, Field, Grid, Multiplier,
    PrimitiveRule, RealField, DEFAULT_DECAY_TOL,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeConfig {
    pub cutoff: DyadicCutoff,
    /// Sign `s` of the mBO nonlinearity `s u^2 u_x`.
    pub sign: Sign,
    /// Dealiasing applied to `u^2 u_x`; 1 keeps every mode.
    pub dealias_fraction: f64,
    pub decay_tol: f64,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        GaugeConfig {
            cutoff: DyadicCutoff::default(),
            sign: Sign::Plus,
            dealias_fraction: 1.0,
            decay_tol: DEFAULT_DECAY_TOL,
        }
    }
}

/// `v_N`, its phase primitive and (optionally) the five forcing terms.
#[derive(Debug, Clone)]
pub struct GaugeBundle {
    pub scale: u64,
    /// `F = int_{x_left}^x (P_{<<N} u)^2`
    pub phase_primitive: RealField,
    /// `P_+ P_N u`
    pub projected: ComplexField,
    pub v: ComplexField,
    pub rhs_terms: Option<[ComplexField; 5]>,
    /// `d_xx v_N` by the product rule, so the seam jump of `F` never enters.
    pub v_xx: Option<ComplexField>,
    /// `F` at the right boundary: the phase jump across the periodic seam.
    pub boundary_mismatch: f64,
    pub warnings: Vec<String>,
}

/// Spectral pieces shared by the transform and the forcing terms.
struct Pieces {
    grid: std::sync::Arc<Grid>,
    spec: Vec<Complex64>,
    low_sym: Vec<f64>,
    wsym: Vec<f64>,
}

impl Pieces {
    fn new(u: &RealField, n: u64, cutoff: &DyadicCutoff) -> Result<Self> {
        let grid = u.grid().clone();
        check_resolvable(&grid, n)?;
        let block = cutoff.sample(&grid, Band::Block(n))?;
        let low_sym = cutoff.sample(&grid, Band::Low(n))?;
        let wsym = block
            .iter()
            .zip(grid.fft_wavenumbers())
            .map(|(&b, &xi)| if xi > 0.0 { b } else { 0.0 })
            .collect();
        Ok(Pieces {
            spec: u.spectrum(),
            grid,
            low_sym,
            wsym,
        })
    }

    fn synth(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Vec<Complex64> {
        let mut s: Vec<_> = self.spec.iter().enumerate().map(|(k, &c)| f(k, c)).collect();
        self.grid.inverse(&mut s);
        s
    }

    fn real(&self, f: impl Fn(usize, Complex64) -> Complex64) -> RealField {
        let s = self.synth(f);
        RealField::from_raw(self.grid.clone(), s.into_iter().map(|c| c.re).collect())
    }

    fn complex(&self, f: impl Fn(usize, Complex64) -> Complex64) -> ComplexField {
        ComplexField::from_raw(self.grid.clone(), self.synth(f))
    }

    fn xi(&self, k: usize) -> f64 {
        if k == self.grid.nyquist_index() {
            0.0
        } else {
            self.grid.fft_wavenumbers()[k]
        }
    }
}

fn phase_factor(f: &RealField) -> Vec<Complex64> {
    f.samples().iter().map(|&v| (-0.5 * I * v).exp()).collect()
}

fn transform_with(u: &RealField, n: u64, cfg: &GaugeConfig) -> Result<(Pieces, GaugeBundle)> {
    let p = Pieces::new(u, n, &cfg.cutoff)?;
    let low = p.real(|k, c| c * p.low_sym[k]);
    let w = p.complex(|k, c| c * p.wsym[k]);
    let prim = primitive_with(&low.map(|v| v * v), PrimitiveRule::Spectral, cfg.decay_tol);
    let e = phase_factor(&prim.field);
    let v = ComplexField::from_raw(
        p.grid.clone(),
        w.samples().iter().zip(&e).map(|(a, b)| a * b).collect(),
    );
    let mismatch = *prim.field.samples().last().expect("non-empty");
    let bundle = GaugeBundle {
        scale: n,
        phase_primitive: prim.field,
        projected: w,
        v,
        rhs_terms: None,
        v_xx: None,
        boundary_mismatch: mismatch,
        warnings: prim.decay_warning.into_iter().collect(),
    };
    Ok((p, bundle))
}

/// `v_N = exp(-iF/2) P_+ P_N u` and `F`.
pub fn gauge_transform(u: &RealField, n: u64, cfg: &GaugeConfig) -> Result<GaugeBundle> {
    Ok(transform_with(u, n, cfg)?.1)
}

/// `G = -s u^2 u_x` under the configured dealiasing.
fn forcing(u_spec: &[Complex64], grid: &std::sync::Arc<Grid>, cfg: &GaugeConfig) -> RealField {
    let eq = crate::evolution::EquationSpec::new(EquationKind::Mbo, cfg.sign);
    let term = NonlinearTerm::new(grid.clone(), eq, cfg.dealias_fraction);
    let mut g = term.eval(u_spec);
    grid.inverse(&mut g);
    RealField::from_raw(grid.clone(), g.into_iter().map(|c| c.re).collect())
}

/// The gauge bundle with all five forcing terms assembled.
pub fn gauge_rhs_terms(u: &RealField, n: u64, cfg: &GaugeConfig) -> Result<GaugeBundle> {
    rhs_terms_impl(u, n, cfg, true)
}

/// With `with_forcing = false` the flow is taken to be the free one, `G = 0`.
fn rhs_terms_impl(u: &RealField, n: u64, cfg: &GaugeConfig, with_forcing: bool) -> Result<GaugeBundle> {
    let (p, mut bundle) = transform_with(u, n, cfg)?;
    let grid = p.grid.clone();
    let e = phase_factor(&bundle.phase_primitive);
    let w = bundle.projected.samples();
    let low = p.real(|k, c| c * p.low_sym[k]);
    let low_x = p.real(|k, c| c * I * p.xi(k) * p.low_sym[k]);
    // H d_x has symbol |xi|
    let h_low_x = p.real(|k, c| c * p.xi(k).abs() * p.low_sym[k]);
    let w_x = p.complex(|k, c| c * I * p.xi(k) * p.wsym[k]);
    let w_xx = p.complex(|k, c| -c * p.xi(k).powi(2) * p.wsym[k]);

    let g = if with_forcing {
        forcing(&p.spec, &grid, cfg)
    } else {
        RealField::zeros(grid.clone())
    };
    let g_spec = g.spectrum();
    let mut pg = g_spec.iter().enumerate().map(|(k, &c)| c * p.wsym[k]).collect::<Vec<_>>();
    grid.inverse(&mut pg);
    let mut low_g = g_spec
        .iter()
        .enumerate()
        .map(|(k, &c)| c * p.low_sym[k])
        .collect::<Vec<_>>();
    grid.inverse(&mut low_g);

    let tol = cfg.decay_tol;
    let inner3 = primitive_with(&h_low_x.zip_with(&low_x, |a, b| a * b)?, PrimitiveRule::Spectral, tol);
    let inner4 = primitive_with(
        &RealField::from_raw(
            grid.clone(),
            low_g.iter().zip(low.samples()).map(|(a, b)| a.re * b).collect(),
        ),
        PrimitiveRule::Spectral,
        tol,
    );
    bundle.warnings.extend(inner3.decay_warning.clone());
    bundle.warnings.extend(inner4.decay_warning.clone());

    let n = grid.n_points();
    let mut a = [(); 5].map(|_| Vec::with_capacity(n));
    let mut v_xx = Vec::with_capacity(n);
    for j in 0..n {
        let l = low.samples()[j];
        let l2 = l * l;
        let ej = e[j];
        let wj = w[j];
        a[0].push(ej * (pg[j] - l2 * w_x.samples()[j]));
        let q = I * h_low_x.samples()[j] - low_x.samples()[j];
        a[1].push(ej * q * l * wj);
        a[2].push(-I * ej * wj * inner3.field.samples()[j]);
        a[3].push(-I * ej * wj * inner4.field.samples()[j]);
        a[4].push(0.25 * I * ej * l2 * l2 * wj);
        let lx = low_x.samples()[j];
        // e'' = e (-i l l_x - l^4 / 4), e' = -(i/2) l^2 e
        v_xx.push(ej * (w_xx.samples()[j] - I * l2 * w_x.samples()[j] - (I * l * lx + 0.25 * l2 * l2) * wj));
    }
    bundle.v_xx = Some(ComplexField::from_raw(grid.clone(), v_xx));
    bundle.rhs_terms = Some(a.map(|s| ComplexField::from_raw(grid.clone(), s)));
    Ok(bundle)
}

/// Gauge for complex data: `exp(-(i/2) int^x |P_{<<N} u|^2) P_+ P_N u`.
pub fn gauge_transform_complex(u: &ComplexField, n: u64, cfg: &GaugeConfig) -> Result<GaugeBundle> {
    let grid = u.grid().clone();
    check_resolvable(&grid, n)?;
    let low = cfg.cutoff.project_complex(u, Band::Low(n))?;
    let w = cfg
        .cutoff
        .project_complex(u, Band::Block(n))?
        .apply(&Multiplier::positive())?;
    let dens = low.modulus().map(|m| m * m);
    let prim = primitive_with(&dens, PrimitiveRule::Spectral, cfg.decay_tol);
    let e = phase_factor(&prim.field);
    let v = ComplexField::from_raw(
        grid,
        w.samples().iter().zip(&e).map(|(a, b)| a * b).collect(),
    );
    Ok(GaugeBundle {
        scale: n,
        boundary_mismatch: *prim.field.samples().last().expect("non-empty"),
        phase_primitive: prim.field,
        projected: w,
        v,
        rhs_terms: None,
        v_xx: None,
        warnings: prim.decay_warning.into_iter().collect(),
    })
}

/// Residual norm of the splitting of `P_+ P_N (u^2 u_x) - low^2 P_+ P_N u_x`
/// into the fattened-block commutator plus the high-high remainder.
pub fn decomposition_check(u: &RealField, n: u64, cutoff: &DyadicCutoff) -> Result<f64> {
    let grid = u.grid().clone();
    check_resolvable(&grid, n)?;
    let plus = Multiplier::positive();
    let pn = cutoff.multiplier(Band::Block(n));
    let pt = cutoff.multiplier(Band::Fattened(n));
    let low = cutoff.project_real(u, Band::Low(n))?;
    let low2 = low.map(|v| v * v);
    let ux = u.apply(&Multiplier::derivative(1))?;
    let u2ux = u.zip_with(&ux, |a, b| a * a * b)?;

    let lhs_a = u2ux.apply_complex(&plus.then(&pn))?;
    let lhs_b = ux.apply_complex(&plus.then(&pn))?.mul_real(&low2)?;
    let lhs = lhs_a.zip_with(&lhs_b, |a, b| a - b)?;

    let ptux = ux.apply_complex(&plus.then(&pt))?;
    let r1 = ptux.mul_real(&low2)?.apply(&pn)?;
    let r2 = ux.apply_complex(&plus.then(&pn).then(&pt))?.mul_real(&low2)?;
    let hh = u.zip_with(&low, |a, l| a * a - l * l)?.zip_with(&ux, |a, b| a * b)?;
    let r3 = hh.apply_complex(&plus.then(&pn))?;
    let rhs = r1.zip_with(&r2, |a, b| a - b)?.zip_with(&r3, |a, b| a + b)?;
    Ok(lhs.zip_with(&rhs, |a, b| a - b)?.norm_l2())
}

/// What the residual verifier checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualMode {
    /// `(d_t - i d_xx) v_N - sum_j A_j`
    #[default]
    Full,
    /// `(d_t - i d_xx) P_+ P_N u` with the phase frozen at 0 and no forcing.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResidual {
    pub scale: u64,
    /// Interior snapshot times.
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
    /// `||v_N||_{L^2}` at the same times.
    pub v_norm: Vec<f64>,
    /// `max | |v_N| - |P_+ P_N u| |` over all snapshots.
    pub unimodularity_error: f64,
    /// Largest `|F(x_right)|` seen.
    pub boundary_mismatch: f64,
    pub warnings: Vec<String>,
}

impl GaugeResidual {
    /// Root mean square of the residual series.
    pub fn rms(&self) -> f64 {
        if self.residual.is_empty() {
            return 0.0;
        }
        (self.residual.iter().map(|r| r * r).sum::<f64>() / self.residual.len() as f64).sqrt()
    }
}

fn unimodularity(b: &GaugeBundle) -> f64 {
    b.v.samples()
        .iter()
        .zip(b.projected.samples())
        .map(|(v, w)| (v.norm() - w.norm()).abs())
        .fold(0.0, f64::max)
}

/// Residual of the `v_N` evolution law along an mBO trajectory, with `d_t`
/// by centred differences between neighbouring snapshots and `d_xx` spectral.
pub fn gauge_residual(traj: &Trajectory, n: u64, cfg: &GaugeConfig, mode: ResidualMode) -> Result<GaugeResidual> {
    if traj.equation.kind != EquationKind::Mbo {
        return Err(Error::Parameter(format!(
            "gauge residual needs an mBO trajectory, got {}",
            traj.equation.kind
        )));
    }
    if traj.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 snapshots, got {}",
            traj.len()
        )));
    }
    let grid = traj.grid.clone();
    check_resolvable(&grid, n)?;
    let h = traj.spacing();
    let mut cfg = *cfg;
    cfg.sign = traj.equation.sign;
    cfg.dealias_fraction = traj.dealias_fraction;
    let linear = !traj.equation.nonlinear;

    let mut warnings = Vec::new();
    let omega = (n as f64).powi(2);
    if h * omega > 1.0 {
        warnings.push(format!(
            "snapshot spacing {h} under-resolves the phase at N = {n} (h N^2 = {:.2})",
            h * omega
        ));
    }

    let snaps = traj
        .real_snapshots()
        .ok_or_else(|| Error::Parameter("mBO trajectory with complex snapshots".into()))?;
    let v_of = |u: &RealField| -> Result<GaugeBundle> {
        match mode {
            ResidualMode::Full => rhs_terms_impl(u, n, &cfg, !linear),
            ResidualMode::Free => gauge_transform(u, n, &cfg),
        }
    };
    let d2 = Multiplier::derivative(2);
    let mut prev = v_of(snaps[0])?;
    let mut cur = v_of(snaps[1])?;
    let mut uni = unimodularity(&prev).max(unimodularity(&cur));
    let mut mismatch = prev.boundary_mismatch.abs().max(cur.boundary_mismatch.abs());
    let mut residual = Vec::with_capacity(snaps.len() - 2);
    let mut v_norm = Vec::with_capacity(snaps.len() - 2);
    let mut decay_warnings = 0;
    let mut first_decay = None;
    for k in 1..snaps.len() - 1 {
        let next = v_of(snaps[k + 1])?;
        uni = uni.max(unimodularity(&next));
        mismatch = mismatch.max(next.boundary_mismatch.abs());
        let (vp, vc, vn) = match mode {
            ResidualMode::Full => (&prev.v, &cur.v, &next.v),
            ResidualMode::Free => (&prev.projected, &cur.projected, &next.projected),
        };
        let lap = match &cur.v_xx {
            Some(v) if mode == ResidualMode::Full => v.clone(),
            _ => vc.apply(&d2)?,
        };
        let mut r: Vec<Complex64> = (0..grid.n_points())
            .map(|j| (vn.samples()[j] - vp.samples()[j]) / (2.0 * h) - I * lap.samples()[j])
            .collect();
        if let (ResidualMode::Full, Some(terms)) = (mode, &cur.rhs_terms) {
            for t in terms {
                for (a, b) in r.iter_mut().zip(t.samples()) {
                    *a -= b;
                }
            }
        }
        residual.push(ComplexField::from_raw(grid.clone(), r).norm_l2());
        v_norm.push(vc.norm_l2());
        decay_warnings += cur.warnings.len();
        if first_decay.is_none() {
            first_decay = cur.warnings.first().cloned();
        }
        prev = std::mem::replace(&mut cur, next);
    }
    if let Some(w) = first_decay {
        warnings.push(format!("{w} ({decay_warnings} primitives flagged)"));
    }
    Ok(GaugeResidual {
        scale: n,
        times: traj.times[1..traj.len() - 1].to_vec(),
        residual,
        v_norm,
        unimodularity_error: uni,
        boundary_mismatch: mismatch,
        warnings,
    })
}

/// `v_N` for either kind of snapshot.
pub fn gauge_field(f: &Field, n: u64, cfg: &GaugeConfig) -> Result<GaugeBundle> {
    match f {
        Field::Real(u) => gauge_transform(u, n, cfg),
        Field::Complex(u) => gauge_transform_complex(u, n, cfg),
    }
}

/// Fraction of the `L^2` mass above `|xi| = N/2` in the periodic part of
/// `int^x H P_{<<N} u_x * P_{<<N} u_x`, i.e. the primitive with its linear
/// growth `mean * (x - x_left)` removed.
pub fn a3_localization(u: &RealField, n: u64, cutoff: &DyadicCutoff) -> Result<f64> {
    let p = Pieces::new(u, n, cutoff)?;
    let low_x = p.real(|k, c| c * I * p.xi(k) * p.low_sym[k]);
    let h_low_x = p.real(|k, c| c * p.xi(k).abs() * p.low_sym[k]);
    let spec = h_low_x.zip_with(&low_x, |a, b| a * b)?.spectrum();
    let xi = p.grid.fft_wavenumbers();
    let (mut above, mut total) = (0.0, 0.0);
    for (k, c) in spec.iter().enumerate().skip(1) {
        let m = (c / xi[k]).norm_sqr();
        total += m;
        if xi[k].abs() > n as f64 / 2.0 {
            above += m;
        }
    }
    Ok(if total > 0.0 { above / total } else { 0.0 })
}
