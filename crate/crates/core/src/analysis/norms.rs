use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::spectral::{ladder, lp_norm, Band, DyadicCutoff, Field, Grid, Multiplier};

/// Which variable the outer norm is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outer {
    /// `L_x^p L_T^q`: time norm at each point, then space.
    Space,
    /// `L_T^q L_x^p`: space norm at each time, then time.
    Time,
}

/// Exponents of a mixed Lebesgue norm; `f64::INFINITY` for sup norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNormSpec {
    pub outer: Outer,
    pub p_outer: f64,
    pub q_inner: f64,
}

impl MixedNormSpec {
    /// `L_x^p L_T^q`
    pub fn space_time(p: f64, q: f64) -> Self {
        MixedNormSpec { outer: Outer::Space, p_outer: p, q_inner: q }
    }

    /// `L_T^q L_x^p`
    pub fn time_space(q: f64, p: f64) -> Self {
        MixedNormSpec { outer: Outer::Time, p_outer: q, q_inner: p }
    }

    pub fn validate(&self) -> Result<()> {
        for e in [self.p_outer, self.q_inner] {
            if !(e >= 1.0) {
                return Err(Error::Parameter(format!("norm exponent must be >= 1, got {e}")));
            }
        }
        Ok(())
    }
}

/// Pointwise moduli `|u(x_j, t_k)|` on a uniform spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTime {
    pub times: Vec<f64>,
    pub dx: f64,
    /// `values[k][j] = |u(x_j, t_k)|`
    pub values: Vec<Vec<f64>>,
}

impl SpaceTime {
    pub fn new(times: Vec<f64>, dx: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if values.len() != times.len() {
            return Err(Error::GridMismatch(format!(
                "{} time levels for {} snapshots",
                times.len(),
                values.len()
            )));
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(Error::GridMismatch("snapshots of differing length".into()));
        }
        Ok(SpaceTime { times, dx, values })
    }

    pub fn from_trajectory(traj: &Trajectory) -> Result<Self> {
        let values = traj.snapshots.iter().map(|f| f.modulus().into_samples()).collect();
        SpaceTime::new(traj.times.clone(), traj.grid.dx(), values)
    }

    fn time_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.times)
    }
}

/// Trapezoidal weights on the given nodes; a single node gets weight 0.
pub fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let m = t.len();
    let mut w = vec![0.0; m];
    for k in 0..m.saturating_sub(1) {
        let h = 0.5 * (t[k + 1] - t[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

fn weighted_norm(values: impl Iterator<Item = f64>, weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values
            .zip(weights)
            .map(|(v, w)| w * v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Mixed norm of tabulated moduli: inner by trapezoid in time or periodic
/// sum in space, outer likewise, grid maxima for infinite exponents.
pub fn mixed_norm_values(st: &SpaceTime, spec: MixedNormSpec) -> Result<f64> {
    spec.validate()?;
    let w = st.time_weights();
    let n = st.values[0].len();
    Ok(match spec.outer {
        Outer::Space => {
            let inner = (0..n).map(|j| weighted_norm(st.values.iter().map(|v| v[j]), &w, spec.q_inner));
            lp_norm(inner, st.dx, spec.p_outer)
        }
        Outer::Time => {
            let inner: Vec<f64> = st
                .values
                .iter()
                .map(|v| lp_norm(v.iter().copied(), st.dx, spec.q_inner))
                .collect();
            weighted_norm(inner.into_iter(), &w, spec.p_outer)
        }
    })
}

pub fn mixed_norm(traj: &Trajectory, spec: MixedNormSpec) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    mixed_norm_values(&SpaceTime::from_trajectory(traj)?, spec)
}

/// `(int_0^T int |u|^2 dx dt)^{1/2}` with the same quadrature.
pub fn spacetime_l2(traj: &Trajectory) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let w = trapezoid_weights(&traj.times);
    let dx = traj.grid.dx();
    let s: f64 = traj
        .snapshots
        .iter()
        .zip(&w)
        .map(|(f, wk)| wk * dx * f.modulus().samples().iter().map(|v| v * v).sum::<f64>())
        .sum();
    Ok(s.sqrt())
}

/// Snapshot spectra, transformed once and reused for every multiplier.
pub(crate) struct Spectra {
    pub grid: Arc<Grid>,
    pub times: Vec<f64>,
    pub real: bool,
    pub spectra: Vec<Vec<Complex64>>,
}

impl Spectra {
    pub fn new(traj: &Trajectory) -> Result<Self> {
        if traj.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        Ok(Spectra {
            grid: traj.grid.clone(),
            times: traj.times.clone(),
            real: traj.snapshots.iter().all(Field::is_real),
            spectra: traj.snapshots.iter().map(Field::spectrum).collect(),
        })
    }

    /// Moduli of `m(D) u` at every snapshot. For real data the real part is
    /// kept, which drops the Nyquist component of odd symbols.
    pub fn apply(&self, m: &Multiplier) -> Result<SpaceTime> {
        let sym = m.sample(self.grid.fft_wavenumbers())?;
        let values = self
            .spectra
            .iter()
            .map(|s| {
                let mut v: Vec<Complex64> = s.iter().zip(&sym).map(|(a, b)| a * b).collect();
                self.grid.inverse(&mut v);
                if self.real {
                    v.iter().map(|c| c.re.abs()).collect()
                } else {
                    v.iter().map(|c| c.norm()).collect()
                }
            })
            .collect();
        SpaceTime::new(self.times.clone(), self.grid.dx(), values)
    }

    /// `sup_t ||<D>^s u(t)||_{L^2}`, spectrally.
    pub fn sup_sobolev(&self, s: f64) -> f64 {
        let xi = self.grid.fft_wavenumbers();
        let l = self.grid.length();
        self.spectra
            .iter()
            .map(|sp| {
                (l * sp
                    .iter()
                    .zip(xi)
                    .map(|(c, x)| (1.0 + x * x).powf(s) * c.norm_sqr())
                    .sum::<f64>())
                .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Dyadic pieces summed in the X and Y norms: `P_0` and the resolvable
/// ladder `P_1, P_2, ..`.
pub fn norm_bands(grid: &Grid) -> Vec<Band> {
    std::iter::once(Band::Zero)
        .chain(ladder(grid).into_iter().map(Band::Block))
        .collect()
}

/// The four groups of the `X_T^s` norm and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct XNorm {
    /// `||u||_{L_T^infty H^s}`
    pub energy: f64,
    /// `(sum_k sum_N ||D^{s+1/2-k} d^k P_N u||^2_{L_x^infty L_T^2})^{1/2}`
    pub smoothing: f64,
    /// `(sum_k sum_N ||<D>^{s-k-1/2} d^k P_N u||^2_{L_x^2 L_T^infty})^{1/2}`
    pub maximal_l2: f64,
    /// `(sum_k sum_N ||<D>^{s-k-1/4} d^k P_N u||^2_{L_x^4 L_T^infty})^{1/2}`
    pub maximal_l4: f64,
}

impl XNorm {
    pub fn total(&self) -> f64 {
        self.energy + self.smoothing + self.maximal_l2 + self.maximal_l4
    }
}

fn block_sum(
    sp: &Spectra,
    bands: &[Band],
    cutoff: &DyadicCutoff,
    ks: std::ops::RangeInclusive<u32>,
    weight: impl Fn(u32) -> Multiplier,
    spec: MixedNormSpec,
) -> Result<f64> {
    let mut total = 0.0;
    for k in ks {
        let base = weight(k).then(&Multiplier::derivative(k));
        for &b in bands {
            let m = base.then(&cutoff.multiplier(b));
            let v = mixed_norm_values(&sp.apply(&m)?, spec)?;
            total += v * v;
        }
    }
    Ok(total.sqrt())
}

pub(crate) fn x_norm_spectra(sp: &Spectra, s: f64, cutoff: &DyadicCutoff) -> Result<XNorm> {
    if !(s >= 0.5) {
        return Err(Error::Parameter(format!("X norm needs s >= 1/2, got {s}")));
    }
    let bands = norm_bands(&sp.grid);
    let top_smooth = (s + 0.5).floor() as u32;
    let top_max = s.floor() as u32;
    Ok(XNorm {
        energy: sp.sup_sobolev(s),
        smoothing: block_sum(
            sp,
            &bands,
            cutoff,
            1..=top_smooth,
            |k| Multiplier::abs_power(s + 0.5 - f64::from(k)),
            MixedNormSpec::space_time(f64::INFINITY, 2.0),
        )?,
        maximal_l2: block_sum(
            sp,
            &bands,
            cutoff,
            0..=top_max,
            |k| Multiplier::bracket_power(s - f64::from(k) - 0.5),
            MixedNormSpec::space_time(2.0, f64::INFINITY),
        )?,
        maximal_l4: block_sum(
            sp,
            &bands,
            cutoff,
            0..=top_max,
            |k| Multiplier::bracket_power(s - f64::from(k) - 0.25),
            MixedNormSpec::space_time(4.0, f64::INFINITY),
        )?,
    })
}

/// `||u||_{X_T^s}` block by block, the `N` sums over `P_0` and the
/// resolvable ladder.
pub fn x_norm(traj: &Trajectory, s: f64, cutoff: &DyadicCutoff) -> Result<XNorm> {
    x_norm_spectra(&Spectra::new(traj)?, s, cutoff)
}

/// The four terms of the `Y` norm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct YNorm {
    pub energy: f64,
    pub smoothing: f64,
    pub maximal_l2: f64,
    pub maximal_l4: f64,
}

impl YNorm {
    pub fn total(&self) -> f64 {
        self.energy + self.smoothing + self.maximal_l2 + self.maximal_l4
    }
}

/// `sup_t ||u||_{H^{1/2}} + ||u_x||_{L_x^infty L_T^2} + ||u||_{L_x^2 L_T^infty}
/// + ||<D>^{1/4} u||_{L_x^4 L_T^infty}`
pub fn y_norm(traj: &Trajectory) -> Result<YNorm> {
    let sp = Spectra::new(traj)?;
    Ok(YNorm {
        energy: sp.sup_sobolev(0.5),
        smoothing: mixed_norm_values(
            &sp.apply(&Multiplier::derivative(1))?,
            MixedNormSpec::space_time(f64::INFINITY, 2.0),
        )?,
        maximal_l2: mixed_norm_values(
            &sp.apply(&Multiplier::identity())?,
            MixedNormSpec::space_time(2.0, f64::INFINITY),
        )?,
        maximal_l4: mixed_norm_values(
            &sp.apply(&Multiplier::bracket_power(0.25))?,
            MixedNormSpec::space_time(4.0, f64::INFINITY),
        )?,
    })
}

/// Mixed norm built one time slice at a time, for evolutions too long to
/// tabulate.
#[derive(Debug, Clone)]
pub struct MixedAccumulator {
    spec: MixedNormSpec,
    weights: Vec<f64>,
    dx: f64,
    acc: Vec<f64>,
    next: usize,
}

impl MixedAccumulator {
    pub fn new(spec: MixedNormSpec, times: &[f64], n_points: usize, dx: f64) -> Result<Self> {
        spec.validate()?;
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        let len = match spec.outer {
            Outer::Space => n_points,
            Outer::Time => 1,
        };
        Ok(MixedAccumulator { spec, weights: trapezoid_weights(times), dx, acc: vec![0.0; len], next: 0 })
    }

    /// Adds the moduli of the next time slice.
    pub fn push(&mut self, slice: &[f64]) {
        let w = self.weights[self.next];
        self.next += 1;
        match self.spec.outer {
            Outer::Space => {
                let q = self.spec.q_inner;
                for (a, &v) in self.acc.iter_mut().zip(slice) {
                    if q.is_infinite() {
                        *a = a.max(v);
                    } else {
                        *a += w * v.powf(q);
                    }
                }
            }
            Outer::Time => {
                let inner = lp_norm(slice.iter().copied(), self.dx, self.spec.q_inner);
                let p = self.spec.p_outer;
                if p.is_infinite() {
                    self.acc[0] = self.acc[0].max(inner);
                } else {
                    self.acc[0] += w * inner.powf(p);
                }
            }
        }
    }

    pub fn finish(&self) -> Result<f64> {
        if self.next != self.weights.len() {
            return Err(Error::InsufficientData(format!(
                "{} of {} time slices supplied",
                self.next,
                self.weights.len()
            )));
        }
        Ok(match self.spec.outer {
            Outer::Space => {
                let q = self.spec.q_inner;
                let inner = self.acc.iter().map(|&a| if q.is_infinite() { a } else { a.powf(1.0 / q) });
                lp_norm(inner, self.dx, self.spec.p_outer)
            }
            Outer::Time => {
                let p = self.spec.p_outer;
                if p.is_infinite() {
                    self.acc[0]
                } else {
                    self.acc[0].powf(1.0 / p)
                }
            }
        })
    }
}
