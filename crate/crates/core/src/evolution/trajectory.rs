use std::sync::Arc;

use super::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, RealField};

/// Snapshots of a field at uniformly spaced times on one grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub equation: EquationSpec,
    pub grid: Arc<Grid>,
    /// Solver step; the snapshot spacing is `dt * snapshot_stride`.
    pub dt: f64,
    pub snapshot_stride: usize,
    /// Dealiasing used by the producing solver (1 for hand-built trajectories).
    pub dealias_fraction: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
    /// Largest imaginary part discarded from real snapshots.
    pub max_imag_residue: f64,
    pub diagnostics: Vec<String>,
}

impl Trajectory {
    /// Assembles a trajectory from externally produced snapshots, checking
    /// uniform spacing and a common grid.
    pub fn from_snapshots(equation: EquationSpec, times: Vec<f64>, snapshots: Vec<Field>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if times.len() != snapshots.len() {
            return Err(Error::Parameter(format!(
                "{} times for {} snapshots",
                times.len(),
                snapshots.len()
            )));
        }
        let grid = snapshots[0].grid().clone();
        if let Some(bad) = snapshots.iter().find(|s| !s.grid().same_as(&grid)) {
            return Err(Error::GridMismatch(format!("{:?} vs {grid:?}", bad.grid())));
        }
        let spacing = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
        if times.len() > 1 && !(spacing > 0.0) {
            return Err(Error::Parameter("times must be increasing".into()));
        }
        for (k, &t) in times.iter().enumerate() {
            let expected = times[0] + k as f64 * spacing;
            if (t - expected).abs() > 1e-9 * spacing.max(t.abs()).max(1e-300) {
                return Err(Error::Parameter(format!("non-uniform time at index {k}: {t}")));
            }
        }
        Ok(Trajectory {
            equation,
            grid,
            dt: if spacing > 0.0 { spacing } else { 1.0 },
            snapshot_stride: 1,
            dealias_fraction: 1.0,
            times,
            snapshots,
            max_imag_residue: 0.0,
            diagnostics: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Time between consecutive snapshots.
    pub fn spacing(&self) -> f64 {
        self.dt * self.snapshot_stride as f64
    }

    /// Final time minus initial time.
    pub fn duration(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn final_field(&self) -> &Field {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// Real snapshots, or `None` for a complex trajectory.
    pub fn real_snapshots(&self) -> Option<Vec<&RealField>> {
        self.snapshots.iter().map(Field::as_real).collect()
    }

    /// Applies `f` to every snapshot, keeping times and metadata.
    pub fn map(&self, f: impl Fn(&Field) -> Result<Field>) -> Result<Trajectory> {
        let snapshots = self.snapshots.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            snapshots,
            ..self.clone()
        })
    }

    /// Every `k`-th snapshot.
    pub fn subsample(&self, k: usize) -> Trajectory {
        let k = k.max(1);
        Trajectory {
            snapshot_stride: self.snapshot_stride * k,
            times: self.times.iter().step_by(k).copied().collect(),
            snapshots: self.snapshots.iter().step_by(k).cloned().collect(),
            ..self.clone()
        }
    }
}
