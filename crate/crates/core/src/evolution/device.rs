use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit coherence and readout parameters.
///
/// The defaults are the measured values of the Xmon device: ω10/2π = 5.266 GHz,
/// T1 = 19.0 µs, T2* = 10.0 µs, and readout fidelities 98.0 % (|0⟩) and 93.6 % (|1⟩).
/// T2* is taken as the pure-dephasing time, so Γφ = 1/T2* enters the
/// dephasing dissipator directly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceParams {
    pub t1_us: f64,
    pub t2_star_us: f64,
    /// Informational only; dynamics run in the rotating frame.
    pub f10_ghz: f64,
    pub readout_f0: f64,
    pub readout_f1: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self { t1_us: 19.0, t2_star_us: 10.0, f10_ghz: 5.266, readout_f0: 0.980, readout_f1: 0.936 }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1_us > 0.0) {
            return Err(Error::InvalidDevice(format!("T1 must be positive, got {}", self.t1_us)));
        }
        if !(self.t2_star_us > 0.0) {
            return Err(Error::InvalidDevice(format!("T2* must be positive, got {}", self.t2_star_us)));
        }
        for (name, f) in [("readout_f0", self.readout_f0), ("readout_f1", self.readout_f1)] {
            if !(f > 0.5 && f <= 1.0) {
                return Err(Error::InvalidDevice(format!("{name} must lie in (0.5, 1], got {f}")));
            }
        }
        Ok(())
    }

    /// Γ1 = 1/T1 in 1/ns.
    pub fn relaxation_rate(&self) -> f64 {
        1.0 / (self.t1_us * 1e3)
    }

    /// Γφ = 1/T2* in 1/ns.
    pub fn dephasing_rate(&self) -> f64 {
        1.0 / (self.t2_star_us * 1e3)
    }

    pub fn rates(&self) -> DecoherenceRates {
        DecoherenceRates { relaxation: self.relaxation_rate(), dephasing: self.dephasing_rate() }
    }
}

/// Lindblad rates in 1/ns. Either may be zero.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DecoherenceRates {
    pub relaxation: f64,
    pub dephasing: f64,
}

impl DecoherenceRates {
    pub const NONE: Self = Self { relaxation: 0.0, dephasing: 0.0 };
}
