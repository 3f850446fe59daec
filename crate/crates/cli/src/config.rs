//! Experiment configuration documents.

use std::path::Path;

use geomgate::benchmarking::{RbConfig, DEFAULT_LENGTHS, DEFAULT_RANDOMIZATIONS};
use geomgate::evolution::{DeviceParams, DEFAULT_DT_NS};
use geomgate::pulse::{Envelope, DEFAULT_SEGMENT_NS};
use geomgate::qcore::{GateSpec, NamedGate};
use geomgate::tomography::{MeasurementMode, QptOptions};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A gate given by name, or by its rotation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSelector {
    Name(String),
    Angles(GateSpec),
}

impl GateSelector {
    pub fn named(g: NamedGate) -> Self {
        GateSelector::Name(g.name().to_string())
    }

    /// Display label, file-name stem, and spec.
    pub fn resolve(&self) -> Result<(String, String, GateSpec), CliError> {
        match self {
            GateSelector::Name(n) => {
                let g: NamedGate = n.parse().map_err(|e| CliError::Config(format!("{e}")))?;
                Ok((g.name().to_string(), g.slug().to_string(), g.spec()))
            }
            GateSelector::Angles(spec) => {
                spec.validate().map_err(|e| CliError::Config(format!("{e}")))?;
                let label = format!("theta={},phi={},gamma={}", spec.theta, spec.phi, spec.gamma);
                let slug = format!("theta{:.4}_phi{:.4}_gamma{:.4}", spec.theta, spec.phi, spec.gamma).replace('-', "m");
                Ok((label, slug, *spec))
            }
        }
    }
}

/// Initial state of the synthesized trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// Dressed eigenstate |ψ+⟩ along the rotation axis.
    #[default]
    Plus,
    Minus,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    pub gate: GateSelector,
    pub initial_state: InitialState,
    pub envelope: Envelope,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self { gate: GateSelector::named(NamedGate::H), initial_state: InitialState::Plus, envelope: Envelope::Sin2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QptSection {
    pub gates: Vec<GateSelector>,
    pub clip_to_cp: bool,
}

impl Default for QptSection {
    fn default() -> Self {
        Self { gates: NamedGate::ALL.iter().map(|&g| GateSelector::named(g)).collect(), clip_to_cp: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RbSection {
    pub sequence_lengths: Vec<usize>,
    pub randomizations: usize,
    pub reference: bool,
    /// Gate names benchmarked by interleaving.
    pub interleaved: Vec<String>,
}

impl Default for RbSection {
    fn default() -> Self {
        Self {
            sequence_lengths: DEFAULT_LENGTHS.to_vec(),
            randomizations: DEFAULT_RANDOMIZATIONS,
            reference: true,
            interleaved: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub device: DeviceParams,
    /// Simulate decoherence and readout errors from `device`.
    pub noise: bool,
    pub segment_ns: f64,
    pub dt_ns: f64,
    pub mode: MeasurementMode,
    pub seed: u64,
    pub synth: SynthSection,
    pub qpt: QptSection,
    pub rb: RbSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            device: DeviceParams::default(),
            noise: true,
            segment_ns: DEFAULT_SEGMENT_NS,
            dt_ns: DEFAULT_DT_NS,
            mode: MeasurementMode::Exact,
            seed: 0,
            synth: SynthSection::default(),
            qpt: QptSection::default(),
            rb: RbSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses a JSON document; syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| CliError::Config(m);
        self.device.validate().map_err(|e| bad(format!("device: {e}")))?;
        if !(self.segment_ns > 0.0 && self.segment_ns.is_finite()) {
            return Err(bad(format!("segment_ns must be positive, got {}", self.segment_ns)));
        }
        let limit = self.segment_ns / 100.0;
        if !(self.dt_ns > 0.0 && self.dt_ns <= limit) {
            return Err(bad(format!("dt_ns must lie in (0, {limit}], got {}", self.dt_ns)));
        }
        self.synth.gate.resolve()?;
        if self.qpt.gates.is_empty() {
            return Err(bad("qpt.gates is empty".into()));
        }
        for g in &self.qpt.gates {
            g.resolve()?;
        }
        self.rb_config(None).validate().map_err(|e| bad(format!("rb: {e}")))?;
        if self.rb.sequence_lengths.len() < 3 {
            return Err(bad("rb.sequence_lengths needs at least 3 lengths for the decay fit".into()));
        }
        for name in &self.rb.interleaved {
            self.rb_config(Some(name)).validate().map_err(|e| bad(format!("rb.interleaved: {e}")))?;
        }
        Ok(())
    }

    pub fn device(&self) -> Option<&DeviceParams> {
        self.noise.then_some(&self.device)
    }

    pub fn qpt_options(&self) -> QptOptions {
        QptOptions {
            mode: self.mode,
            seed: self.seed,
            segment_ns: self.segment_ns,
            dt: self.dt_ns,
            clip_to_cp: self.qpt.clip_to_cp,
        }
    }

    pub fn rb_config(&self, target: Option<&str>) -> RbConfig {
        RbConfig {
            sequence_lengths: self.rb.sequence_lengths.clone(),
            randomizations: self.rb.randomizations,
            mode: self.mode,
            seed: self.seed,
            interleaved_target: target.map(str::to_string),
            segment_ns: self.segment_ns,
            dt: self.dt_ns,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
