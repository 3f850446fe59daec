//! SU(2) and density-matrix arithmetic, axis-angle gates, and the Clifford group.

mod clifford;
mod gate;
mod matrix;

pub use clifford::{clifford_group, recovery_gate, CliffordElement, CliffordGroup, GroupCheck, CLIFFORD_COUNT};
pub use gate::{
    axis_angle_unitary, named_gate, phase_distance, unitary_to_axis_angle, GateSpec, NamedGate,
    INPUT_UNITARY_TOL,
};
pub use matrix::{Complex2x2, DensityMatrix, PureState, UNITARY_TOL};
