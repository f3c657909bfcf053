//! Atomic dynamics under the squeezed-bath master equation and its moment
//! equations.

mod bloch;
mod master;

pub use bloch::{
    default_horizon, integrate_bloch, integrate_bloch_at, steady_state_analytic, steady_state_long_time,
    steady_state_numeric, BlochEquations, BlochState, SteadyState, TrajectoryPoint, LONG_TIME_MAX_BLOCKS,
};
pub use master::{
    master_rhs, master_superoperator, positivity_check, propagate_density, DensityMatrix, PositivityViolation,
    Superoperator, POSITIVITY_TOLERANCE,
};
