//! Propagation of pulse schedules and analysis of the resulting trajectories.

mod channel;
mod device;
mod phase;
mod propagate;
mod trajectory;

pub use channel::PauliTransferMatrix;
pub use device::{DecoherenceRates, DeviceParams};
pub use phase::{
    angle_distance, bloch_trajectory, enclosed_solid_angle, phase_decomposition, spherical_triangle_area,
    wrap_angle, PhaseReport, CLOSURE_TOL, CYCLICITY_TOL,
};
pub use propagate::{
    evolve_lindblad, evolve_lindblad_with_rates, evolve_propagator, evolve_unitary, hamiltonian_at,
    lindblad_final_state, schedule_propagator, segment_hamiltonian, segment_propagator_exact, DEFAULT_DT_NS,
};
pub use trajectory::{bloch_csv, Trajectory, TrajectoryStates};
