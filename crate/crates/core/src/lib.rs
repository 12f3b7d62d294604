//! Pseudospectral simulation and verification for the modified Benjamin-Ono
//! equation `u_t + H u_xx + u^2 u_x = 0` and its relatives (Benjamin-Ono,
//! derivative NLS) on a large periodic cell.
//!
//! * [`spectral`]: grids, transforms, Fourier multipliers, Littlewood-Paley
//!   projections and left-anchored primitives.
//! * [`evolution`]: integrating-factor RK4 solver and the retarded Duhamel
//!   operator.
//! * [`invariants`]: conserved functionals and drift reports.
//! * [`gauge`]: the frequency-localized gauge transform `v_N` and the
//!   residual of its evolution law.
//! * [`analysis`]: mixed space-time norms, `X^s_T` / `Y` norms, the
//!   space-time `L^2` estimate, free-propagator probes and scaling checks.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod gauge;
pub mod invariants;
pub mod profiles;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
