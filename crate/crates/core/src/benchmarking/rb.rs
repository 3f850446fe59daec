//! Reference and interleaved randomized benchmarking.
//!
//! Every Clifford is compiled to one geometric schedule and turned into a
//! Pauli transfer matrix once; a sequence is then the ordered product of those
//! channels acting on |0⟩. This is exact by linearity of the master equation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_decay, DecayCurve, DecayFit, DecayPoint};
use crate::error::{Error, Result};
use crate::evolution::{DeviceParams, PauliTransferMatrix, DEFAULT_DT_NS};
use crate::pulse::DEFAULT_SEGMENT_NS;
use crate::qcore::{clifford_group, named_gate, GateSpec, CLIFFORD_COUNT};
use crate::tomography::{gate_channel, stream_rng, MeasurementMode, ReadoutModel};

pub const DEFAULT_LENGTHS: [usize; 12] = [1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96];
pub const DEFAULT_RANDOMIZATIONS: usize = 50;

const REFERENCE_STREAM: u64 = 0;
const INTERLEAVED_STREAM: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RbConfig {
    pub sequence_lengths: Vec<usize>,
    pub randomizations: usize,
    pub mode: MeasurementMode,
    pub seed: u64,
    /// Gate name for interleaved benchmarking.
    pub interleaved_target: Option<String>,
    pub segment_ns: f64,
    pub dt: f64,
}

impl Default for RbConfig {
    fn default() -> Self {
        Self {
            sequence_lengths: DEFAULT_LENGTHS.to_vec(),
            randomizations: DEFAULT_RANDOMIZATIONS,
            mode: MeasurementMode::Exact,
            seed: 0,
            interleaved_target: None,
            segment_ns: DEFAULT_SEGMENT_NS,
            dt: DEFAULT_DT_NS,
        }
    }
}

impl RbConfig {
    pub fn validate(&self) -> Result<()> {
        let l = &self.sequence_lengths;
        if l.is_empty() || l[0] == 0 || l.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(format!("sequence lengths must be positive and strictly increasing, got {l:?}")));
        }
        if self.randomizations < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 randomizations, got {}", self.randomizations)));
        }
        if !(self.segment_ns > 0.0 && self.segment_ns.is_finite()) {
            return Err(Error::InvalidDuration(self.segment_ns));
        }
        if let Some(t) = &self.interleaved_target {
            named_gate(t)?;
        }
        Ok(())
    }
}

/// How each physical gate is simulated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    Ideal,
    /// Lindblad integration of every compiled schedule, plus readout errors in shot mode.
    Lindblad(DeviceParams),
    /// Ideal gate followed by ρ ↦ (1 − λ)ρ + λI/2.
    Depolarizing(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Clifford(usize),
    Target,
}

/// A random Clifford sequence, optionally interleaved with a target, and its recovery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    pub steps: Vec<Step>,
    pub recovery: usize,
}

impl Sequence {
    /// Number of random Cliffords.
    pub fn length(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Clifford(_))).count()
    }

    /// Clifford indices in execution order, the target as `target_index`, recovery last.
    pub fn indices(&self, target_index: Option<usize>) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Clifford(c) => *c,
                Step::Target => target_index.expect("interleaved sequence needs a target index"),
            })
            .collect();
        out.push(self.recovery);
        out
    }
}

/// m uniform Cliffords and their recovery, from stream 0 of `seed`.
pub fn sample_sequence(m: usize, seed: u64) -> Sequence {
    sample_with(m, None, &mut stream_rng(seed, 0))
}

pub fn sample_interleaved_sequence(m: usize, target_index: usize, seed: u64) -> Sequence {
    sample_with(m, Some(target_index), &mut stream_rng(seed, 0))
}

fn sample_with(m: usize, target: Option<usize>, rng: &mut ChaCha8Rng) -> Sequence {
    let group = clifford_group();
    let mut steps = Vec::with_capacity(2 * m);
    let mut net = 0;
    for _ in 0..m {
        let c = rng.random_range(0..CLIFFORD_COUNT);
        steps.push(Step::Clifford(c));
        net = group.compose(c, net);
        if let Some(t) = target {
            steps.push(Step::Target);
            net = group.compose(t, net);
        }
    }
    Sequence { steps, recovery: group.inverse(net) }
}

/// Precompiled channels of the 24 Cliffords and an optional target.
#[derive(Clone, Debug)]
pub struct RbEngine {
    cliffords: Vec<PauliTransferMatrix>,
    target: Option<(usize, PauliTransferMatrix)>,
    readout: Option<ReadoutModel>,
    mode: MeasurementMode,
}

fn compile(spec: &GateSpec, noise: &NoiseModel, segment_ns: f64, dt: f64) -> Result<PauliTransferMatrix> {
    match noise {
        NoiseModel::Ideal => gate_channel(spec, None, segment_ns, dt),
        NoiseModel::Lindblad(d) => gate_channel(spec, Some(d), segment_ns, dt),
        NoiseModel::Depolarizing(l) => {
            if !(0.0..=1.0).contains(l) {
                return Err(Error::InvalidConfig(format!("depolarizing strength {l} outside [0, 1]")));
            }
            Ok(PauliTransferMatrix::depolarizing(*l) * gate_channel(spec, None, segment_ns, dt)?)
        }
    }
}

impl RbEngine {
    pub fn new(noise: &NoiseModel, mode: MeasurementMode, segment_ns: f64, dt: f64) -> Result<Self> {
        let cliffords = clifford_group()
            .elements()
            .par_iter()
            .map(|e| compile(&e.spec, noise, segment_ns, dt))
            .collect::<Result<Vec<_>>>()?;
        let readout = match (noise, mode) {
            (NoiseModel::Lindblad(d), MeasurementMode::Shots(_)) => Some(ReadoutModel::from_device(d)),
            _ => None,
        };
        Ok(Self { cliffords, target: None, readout, mode })
    }

    /// Adds an interleaving target, compiled from its own spec and optionally followed by extra depolarizing noise.
    pub fn with_target(
        mut self,
        spec: &GateSpec,
        noise: &NoiseModel,
        extra_depolarizing: f64,
        segment_ns: f64,
        dt: f64,
    ) -> Result<Self> {
        spec.validate()?;
        let index = clifford_group()
            .find(&spec.unitary())
            .ok_or_else(|| Error::InvalidGateSpec(format!("{spec:?} is not a Clifford")))?;
        let ch = PauliTransferMatrix::depolarizing(extra_depolarizing) * compile(spec, noise, segment_ns, dt)?;
        self.target = Some((index, ch));
        Ok(self)
    }

    pub fn target_index(&self) -> Option<usize> {
        self.target.map(|t| t.0)
    }

    /// Exact P(|0⟩) after the sequence and its recovery.
    pub fn survival_probability(&self, seq: &Sequence) -> f64 {
        let mut v = [1.0, 0.0, 0.0, 1.0];
        for s in &seq.steps {
            let ch = match s {
                Step::Clifford(c) => &self.cliffords[*c],
                Step::Target => &self.target.as_ref().expect("engine has no target").1,
            };
            v = ch.apply_components(&v);
        }
        v = self.cliffords[seq.recovery].apply_components(&v);
        (v[0] + v[3]) / 2.0
    }

    /// Survival as measured: exact, or the fraction of shots read as 0 (no readout correction).
    pub fn execute(&self, seq: &Sequence, rng: &mut ChaCha8Rng) -> f64 {
        let p = self.survival_probability(seq);
        let MeasurementMode::Shots(shots) = self.mode else {
            return p;
        };
        let n = shots as u64;
        let zeros = Binomial::new(n, p.clamp(0.0, 1.0)).expect("valid binomial").sample(rng);
        let read = match &self.readout {
            None => zeros,
            Some(ro) => {
                Binomial::new(zeros, ro.f0).expect("valid binomial").sample(rng)
                    + Binomial::new(n - zeros, 1.0 - ro.f1).expect("valid binomial").sample(rng)
            }
        };
        read as f64 / n as f64
    }
}

/// One-off execution with its own engine.
pub fn execute_sequence(seq: &Sequence, noise: &NoiseModel, mode: MeasurementMode, seed: u64) -> Result<f64> {
    if seq.steps.contains(&Step::Target) {
        return Err(Error::InvalidConfig("interleaved sequences need an engine with a target".into()));
    }
    let engine = RbEngine::new(noise, mode, DEFAULT_SEGMENT_NS, DEFAULT_DT_NS)?;
    Ok(engine.execute(seq, &mut stream_rng(seed, 1)))
}

fn stream_id(kind: u64, length_index: usize, randomization: usize) -> u64 {
    (kind << 56) | ((length_index as u64) << 28) | randomization as u64
}

/// Samples and executes every (length, randomization) pair, in parallel, aggregated in order.
fn measure_curve(cfg: &RbConfig, engine: &RbEngine, kind: u64) -> DecayCurve {
    let jobs: Vec<(usize, usize)> = (0..cfg.sequence_lengths.len())
        .flat_map(|li| (0..cfg.randomizations).map(move |ri| (li, ri)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(li, ri)| {
            let mut rng = stream_rng(cfg.seed, stream_id(kind, li, ri));
            let seq = sample_with(cfg.sequence_lengths[li], engine.target_index(), &mut rng);
            engine.execute(&seq, &mut rng)
        })
        .collect();
    let points = cfg
        .sequence_lengths
        .iter()
        .zip(values.chunks(cfg.randomizations))
        .map(|(&m, v)| DecayPoint::from_values(m, v.to_vec()))
        .collect();
    let shots = match cfg.mode {
        MeasurementMode::Exact => None,
        MeasurementMode::Shots(n) => Some(n),
    };
    DecayCurve { points, shots }
}

/// A measured curve and the outcome of fitting it.
#[derive(Clone, Debug, PartialEq)]
pub struct RbRun {
    pub curve: DecayCurve,
    pub fit: Result<DecayFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbResult {
    pub reference: DecayFit,
    pub interleaved: Option<DecayFit>,
    /// (1 − p)/2
    pub r: f64,
    /// (1 + p)/2
    pub f_avg: f64,
    pub p_g: Option<f64>,
    /// 1 − (1 − p_g/p)/2
    pub f_g: Option<f64>,
}

impl RbResult {
    pub fn reference(fit: DecayFit) -> Self {
        Self {
            reference: fit,
            interleaved: None,
            r: error_rate(fit.p),
            f_avg: average_fidelity(fit.p),
            p_g: None,
            f_g: None,
        }
    }

    pub fn interleaved(reference: DecayFit, interleaved: DecayFit) -> Self {
        Self {
            interleaved: Some(interleaved),
            p_g: Some(interleaved.p),
            f_g: Some(interleaved_gate_fidelity(reference.p, interleaved.p)),
            ..Self::reference(reference)
        }
    }
}

pub fn error_rate(p: f64) -> f64 {
    (1.0 - p) / 2.0
}

pub fn average_fidelity(p: f64) -> f64 {
    (1.0 + p) / 2.0
}

pub fn interleaved_gate_fidelity(p: f64, p_g: f64) -> f64 {
    1.0 - (1.0 - p_g / p) / 2.0
}

pub fn run_reference_rb(cfg: &RbConfig, noise: &NoiseModel) -> Result<RbRun> {
    cfg.validate()?;
    let engine = RbEngine::new(noise, cfg.mode, cfg.segment_ns, cfg.dt)?;
    let curve = measure_curve(cfg, &engine, REFERENCE_STREAM);
    let fit = fit_decay(&curve);
    Ok(RbRun { curve, fit })
}

/// The gate inserted after every random Clifford.
#[derive(Clone, Debug, PartialEq)]
pub struct InterleavedTarget {
    pub name: String,
    pub spec: GateSpec,
    /// Extra depolarizing strength applied after the target only.
    pub extra_depolarizing: f64,
}

impl InterleavedTarget {
    pub fn named(name: &str) -> Result<Self> {
        Ok(Self { name: name.to_string(), spec: named_gate(name)?, extra_depolarizing: 0.0 })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterleavedRun {
    /// Present when the reference was measured here rather than supplied.
    pub reference: Option<RbRun>,
    pub interleaved: RbRun,
    pub result: Result<RbResult>,
}

/// Interleaved RB on `cfg.interleaved_target`.
pub fn run_interleaved_rb(cfg: &RbConfig, noise: &NoiseModel, reference: Option<&DecayFit>) -> Result<InterleavedRun> {
    let name = cfg
        .interleaved_target
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("interleaved benchmarking needs a target gate".into()))?;
    run_interleaved_rb_with(cfg, noise, &InterleavedTarget::named(name)?, reference)
}

pub fn run_interleaved_rb_with(
    cfg: &RbConfig,
    noise: &NoiseModel,
    target: &InterleavedTarget,
    reference: Option<&DecayFit>,
) -> Result<InterleavedRun> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&target.extra_depolarizing) {
        return Err(Error::InvalidConfig(format!("depolarizing strength {} outside [0, 1]", target.extra_depolarizing)));
    }
    let engine = RbEngine::new(noise, cfg.mode, cfg.segment_ns, cfg.dt)?;
    let (reference_run, reference_fit) = match reference {
        Some(f) => (None, Ok(*f)),
        None => {
            let curve = measure_curve(cfg, &engine, REFERENCE_STREAM);
            let fit = fit_decay(&curve);
            let out = fit.clone();
            (Some(RbRun { curve, fit }), out)
        }
    };
    let engine = engine.with_target(&target.spec, noise, target.extra_depolarizing, cfg.segment_ns, cfg.dt)?;
    let curve = measure_curve(cfg, &engine, INTERLEAVED_STREAM);
    let fit = fit_decay(&curve);
    let result = match (&reference_fit, &fit) {
        (Ok(r), Ok(i)) => Ok(RbResult::interleaved(*r, *i)),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    Ok(InterleavedRun { reference: reference_run, interleaved: RbRun { curve, fit }, result })
}

/// Fit report with `A, B, p, r, F_avg, p_g?, F_g?, converged, residual`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub p: f64,
    pub r: f64,
    #[serde(rename = "F_avg")]
    pub f_avg: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_g: Option<f64>,
    #[serde(rename = "F_g", skip_serializing_if = "Option::is_none", default)]
    pub f_g: Option<f64>,
    pub converged: bool,
    pub residual: f64,
}

impl FitReport {
    /// Report for the fit of the reference curve.
    pub fn reference(res: &RbResult) -> Self {
        let f = &res.reference;
        Self {
            a: f.a,
            b: f.b,
            p: f.p,
            r: res.r,
            f_avg: res.f_avg,
            p_g: None,
            f_g: None,
            converged: f.converged,
            residual: f.residual,
        }
    }

    /// Report for the interleaved fit; `r` and `F_avg` refer to the reference.
    pub fn interleaved(res: &RbResult) -> Option<Self> {
        let f = res.interleaved?;
        Some(Self {
            a: f.a,
            b: f.b,
            p: res.reference.p,
            r: res.r,
            f_avg: res.f_avg,
            p_g: res.p_g,
            f_g: res.f_g,
            converged: f.converged,
            residual: f.residual,
        })
    }
}
