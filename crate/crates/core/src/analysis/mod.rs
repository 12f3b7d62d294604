//! Space-time norms and estimate probes on trajectories and free evolutions.

mod lp;
mod norms;
mod probes;
mod prop14;
mod scaling;

pub use lp::{square_function, square_function_ratio, square_function_probe, SquareFunctionReport};
pub use norms::{
    mixed_norm, mixed_norm_values, norm_bands, spacetime_l2, trapezoid_weights, x_norm, y_norm,
    MixedAccumulator, MixedNormSpec, Outer, SpaceTime, XNorm, YNorm,
};
pub use probes::{
    free_packet, smoothing_slope, strichartz_probe_suite, Estimate, ProbeConfig, ProbeReport,
    SlopeConfig, DEFAULT_MIN_SAMPLES,
};
pub use prop14::{
    ensemble_member, spacetime_l2_check, spacetime_l2_ensemble, spacetime_l2_terms, EnsembleRow,
    EnsembleSpec, SpacetimeL2,
};
pub use scaling::{dilate, scaling_check, ScalingReport, DEFAULT_MAX_POINTS};
