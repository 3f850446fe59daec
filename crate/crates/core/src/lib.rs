//! Pulse-level simulation and characterization of single-qubit nonadiabatic
//! geometric gates.
//!
//! A gate exp(−iγ n·σ/2) is realized by three resonant sin² pulse segments
//! whose areas and phases trace an orange-slice loop on the Bloch sphere, so
//! that the two axis eigenstates pick up pure geometric phases ∓γ/2.
//!
//! - [`qcore`]: 2×2 algebra, axis-angle gates, the Clifford group
//! - [`pulse`]: three-segment schedule synthesis
//! - [`evolution`]: exact and RK4 propagation, Lindblad noise, phase analysis
//! - [`tomography`]: process tomography and χ-matrix reconstruction
//! - [`benchmarking`]: reference and interleaved randomized benchmarking

pub mod benchmarking;
pub mod error;
pub mod evolution;
pub mod pulse;
pub mod qcore;
pub mod tomography;

pub use error::{Error, Result};
