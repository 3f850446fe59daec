//! Randomized benchmarking over geometric Clifford gates.

mod fit;
mod rb;

pub use fit::{fit_decay, fit_exponential, DecayCurve, DecayFit, DecayPoint, FIT_REL_TOL, MAX_FIT_ITERATIONS};
pub use rb::{
    average_fidelity, error_rate, execute_sequence, interleaved_gate_fidelity, run_interleaved_rb,
    run_interleaved_rb_with, run_reference_rb, sample_interleaved_sequence, sample_sequence, FitReport,
    InterleavedRun, InterleavedTarget, NoiseModel, RbConfig, RbEngine, RbResult, RbRun, Sequence, Step,
    DEFAULT_LENGTHS, DEFAULT_RANDOMIZATIONS,
};
