use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("amplification threshold reached: epsilon = {epsilon} must be below gamma/2 = {half_gamma}")]
    AmplificationThreshold { epsilon: f64, half_gamma: f64 },

    #[error("linear phase model requires a nonzero Rabi frequency")]
    LinearPhaseWithoutDrive,

    #[error("degenerate configuration: Omega' = sqrt(Omega^2 + Delta^2) is zero")]
    DegenerateDrive,

    #[error("singular steady-state denominator d = {d:e}")]
    SingularDenominator { d: f64 },

    #[error("singular Bloch linear system")]
    SingularSystem,

    #[error("step size underflow at t = {t} (h = {h:e}); system is too stiff for the explicit integrator")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t_final}")]
    MaxStepsExceeded { max_steps: usize, t_final: f64 },

    #[error("long-time integration did not reach the steady state by t = {t} (|rhs| = {residual:e})")]
    SteadyStateNotReached { t: f64, residual: f64 },

    #[error("quadrature did not converge: estimated error {estimate:e} after {intervals} subintervals")]
    QuadratureNotConverged { estimate: f64, intervals: usize },

    #[error("time {t} lies outside the measurement window [{t_i}, {t_f}]")]
    OutsideWindow { t: f64, t_i: f64, t_f: f64 },

    #[error("survival weak value is singular: the post-selection overlap vanishes")]
    SingularWeakValue,

    #[error("sustainability condition is degenerate: Im M~ vanishes for every phase")]
    DegenerateCondition,

    #[error("sustainability condition undefined: {0}")]
    UndefinedCondition(&'static str),
}

pub(crate) fn require(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.into(),
        })
    }
}
