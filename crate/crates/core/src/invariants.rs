//! Conserved functionals and drift reporting.
//!
//! For `u_t + H u_xx + s u^2 u_x = 0` the conserved quantities are `int u`,
//! `int u^2` and the Hamiltonian `1/2 int u H u_x + (s/12) int u^4`. For the
//! BO flow `u_t + H u_xx + s (u^2)_x = 0` the next conserved energy is
//! `int 1/2 u_x^2 + (3s/4) u^2 H u_x + 1/4 u^4`.

use crate::error::Result;
use crate::evolution::{EquationKind, Trajectory};
use crate::spectral::{Field, Multiplier, RealField};

/// Normalization floor for relative drifts.
pub const DRIFT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassFunctionals {
    pub mean_mass: f64,
    pub l2_mass: f64,
    /// `1/2 int u H u_x`
    pub hamiltonian_quadratic: f64,
    /// `int u^4`
    pub quartic: f64,
    pub hamiltonian: f64,
}

/// Mass, `L^2` mass and Hamiltonian for nonlinearity sign `sign` (+1 or -1).
pub fn mass_functionals(u: &RealField, sign: f64) -> Result<MassFunctionals> {
    let hux = u.apply(&Multiplier::abs_power(1.0))?;
    let quad = 0.5 * u.zip_with(&hux, |a, b| a * b)?.integral();
    let quartic = u.map(|v| v.powi(4)).integral();
    Ok(MassFunctionals {
        mean_mass: u.integral(),
        l2_mass: u.map(|v| v * v).integral(),
        hamiltonian_quadratic: quad,
        quartic,
        hamiltonian: quad + sign * quartic / 12.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `1/2 int u_x^2`
    pub gradient: f64,
    /// `int u^2 H u_x`
    pub cubic: f64,
    /// `int u^4`
    pub quartic: f64,
}

pub fn energy_parts(u: &RealField) -> Result<EnergyParts> {
    let ux = u.apply(&Multiplier::derivative(1))?;
    let hux = u.apply(&Multiplier::abs_power(1.0))?;
    Ok(EnergyParts {
        gradient: 0.5 * ux.map(|v| v * v).integral(),
        cubic: u.zip_with(&hux, |a, b| a * a * b)?.integral(),
        quartic: u.map(|v| v.powi(4)).integral(),
    })
}

/// Conserved BO energy for nonlinearity sign `sign`.
pub fn bo_energy(u: &RealField, sign: f64) -> Result<f64> {
    let p = energy_parts(u)?;
    Ok(p.gradient + 0.75 * sign * p.cubic + 0.25 * p.quartic)
}

/// Time series of the conserved functionals along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    /// `int u` (real flows) or `|int u|` (DNLS).
    pub mean_mass: Vec<f64>,
    /// `int |u|^2`
    pub l2_mass: Vec<f64>,
    pub hamiltonian: Option<Vec<f64>>,
    pub hamiltonian_quadratic: Option<Vec<f64>>,
    pub bo_energy: Option<Vec<f64>>,
}

/// `max_t |Q(t) - Q(0)| / max(|Q(0)|, DRIFT_FLOOR)`.
pub fn relative_drift(series: &[f64]) -> f64 {
    let Some(&q0) = series.first() else {
        return 0.0;
    };
    let scale = q0.abs().max(DRIFT_FLOOR);
    series.iter().map(|q| (q - q0).abs() / scale).fold(0.0, f64::max)
}

impl ConservationReport {
    pub fn mean_drift(&self) -> f64 {
        relative_drift(&self.mean_mass)
    }

    pub fn l2_drift(&self) -> f64 {
        relative_drift(&self.l2_mass)
    }

    pub fn hamiltonian_drift(&self) -> Option<f64> {
        self.hamiltonian.as_deref().map(relative_drift)
    }

    pub fn bo_energy_drift(&self) -> Option<f64> {
        self.bo_energy.as_deref().map(relative_drift)
    }

    /// `(name, drift)` for every reported functional.
    pub fn drifts(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("mean_mass", self.mean_drift()), ("l2_mass", self.l2_drift())];
        if let Some(d) = self.hamiltonian_drift() {
            out.push(("hamiltonian", d));
        }
        if let Some(d) = self.bo_energy_drift() {
            out.push(("bo_energy", d));
        }
        out
    }
}

pub fn drift_report(traj: &Trajectory) -> Result<ConservationReport> {
    let sign = traj.equation.sign.value();
    let n = traj.len();
    let mut mean_mass = Vec::with_capacity(n);
    let mut l2_mass = Vec::with_capacity(n);
    let mut ham = Vec::with_capacity(n);
    let mut quad = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    for snap in &traj.snapshots {
        match snap {
            Field::Real(u) => {
                let m = mass_functionals(u, sign)?;
                mean_mass.push(m.mean_mass);
                l2_mass.push(m.l2_mass);
                ham.push(m.hamiltonian);
                quad.push(m.hamiltonian_quadratic);
                if traj.equation.kind == EquationKind::Bo {
                    energy.push(bo_energy(u, sign)?);
                }
            }
            Field::Complex(u) => {
                mean_mass.push(u.integral().norm());
                l2_mass.push(u.norm_l2().powi(2));
            }
        }
    }
    let real = traj.equation.kind.is_real();
    Ok(ConservationReport {
        times: traj.times.clone(),
        mean_mass,
        l2_mass,
        hamiltonian: real.then_some(ham),
        hamiltonian_quadratic: real.then_some(quad),
        bo_energy: (traj.equation.kind == EquationKind::Bo).then_some(energy),
    })
}
