//! Time integration: exact free propagation composed with classical RK4 on
//! the nonlinear part (integrating factor), and the retarded Duhamel operator.

mod duhamel;
mod equation;
mod solver;
mod trajectory;

pub use duhamel::duhamel;
pub use equation::{EquationKind, EquationSpec, Sign};
pub use solver::{
    dealias_mask, dispersion, linear_propagate, nonlinear_rhs, run, step, SolverConfig, State,
};
pub use trajectory::Trajectory;

pub(crate) use solver::NonlinearTerm;
