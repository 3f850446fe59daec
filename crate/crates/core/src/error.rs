use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unitary (‖U†U − I‖ = {0:.3e})")]
    NonUnitaryInput(f64),

    #[error("unknown gate name `{0}`")]
    UnknownGateName(String),

    #[error("invalid gate parameters: {0}")]
    InvalidGateSpec(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("segment duration must be positive, got {0} ns")]
    InvalidDuration(f64),

    #[error("time {t} ns outside segment [0, {duration}] ns")]
    OutOfRange { t: f64, duration: f64 },

    #[error("time step {dt} ns too large (limit {limit} ns)")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("trajectory is not cyclic (defect {0:.3e})")]
    NotCyclic(f64),

    #[error("path is not closed (endpoint gap {0:.3e})")]
    PathNotClosed(f64),

    #[error("trajectory holds density matrices, expected pure states")]
    NotPure,

    #[error("input states are not informationally complete")]
    SingularSystem,

    #[error("invalid device parameters: {0}")]
    InvalidDevice(String),

    #[error("invalid benchmarking configuration: {0}")]
    InvalidConfig(String),

    #[error("decay fit did not converge after {iterations} iterations")]
    FitDiverged { iterations: usize },
}
