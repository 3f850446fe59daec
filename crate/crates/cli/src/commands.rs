//! The `synth`, `qpt` and `rb` experiments.

use std::fmt::Write as _;
use std::path::Path;

use geomgate::benchmarking::{
    run_interleaved_rb, run_reference_rb, DecayFit, FitReport, NoiseModel, RbResult, RbRun,
};
use geomgate::evolution::{bloch_csv, bloch_trajectory, enclosed_solid_angle, evolve_unitary, phase_decomposition, PhaseReport};
use geomgate::pulse::synthesize_with_envelope;
use geomgate::qcore::{PureState, NamedGate};
use geomgate::tomography::{chi_csv, run_qpt, QptReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, InitialState};
use crate::{write_file, CliError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthReport {
    pub gate: String,
    pub initial_state: InitialState,
    pub segment_phases: [f64; 3],
    pub segment_areas: [f64; 3],
    /// `None` when the initial state does not return to itself.
    pub phases: Option<PhaseReport>,
    pub solid_angle: Option<f64>,
}

/// Writes `schedule.json`, `bloch_path.csv`, `synth_report.json`; returns the stdout text.
pub fn cmd_synth(cfg: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let (label, _, spec) = cfg.synth.gate.resolve()?;
    let schedule = synthesize_with_envelope(&spec, cfg.segment_ns, cfg.synth.envelope)?;
    let (plus, minus) = spec.eigenstates();
    let psi0 = match cfg.synth.initial_state {
        InitialState::Plus => plus,
        InitialState::Minus => minus,
        InitialState::Zero => PureState::zero(),
    };
    let traj = evolve_unitary(&schedule, &psi0, cfg.dt_ns)?;
    let path = bloch_trajectory(&traj)?;
    let phases = phase_decomposition(&traj).ok();
    let solid_angle = match phases {
        Some(_) => Some(enclosed_solid_angle(&path)?),
        None => None,
    };
    let report = SynthReport {
        gate: label.clone(),
        initial_state: cfg.synth.initial_state,
        segment_phases: schedule.segments.map(|s| s.phase_offset),
        segment_areas: schedule.segments.map(|s| s.area()),
        phases,
        solid_angle,
    };
    write_file(out, "schedule.json", &schedule.to_json())?;
    write_file(out, "bloch_path.csv", &bloch_csv(traj.times(), &path))?;
    write_file(out, "synth_report.json", &serde_json::to_string_pretty(&report).expect("report serializes"))?;

    let mut s = String::new();
    let _ = writeln!(s, "gate {label}: θ = {}, φ = {}, γ = {}", spec.theta, spec.phi, spec.gamma);
    let _ = writeln!(
        s,
        "segment phases (rad): {:.6} {:.6} {:.6}",
        report.segment_phases[0], report.segment_phases[1], report.segment_phases[2]
    );
    match (&report.phases, report.solid_angle) {
        (Some(p), Some(omega)) => {
            let _ = writeln!(s, "total phase      {:+.9}", p.total);
            let _ = writeln!(s, "dynamical phase  {:+.3e}", p.dynamical);
            let _ = writeln!(s, "geometric phase  {:+.9}", p.geometric);
            let _ = writeln!(s, "solid angle      {:+.6}", omega);
        }
        _ => {
            let _ = writeln!(s, "initial state is not cyclic under this gate; no phase split");
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QptSummary {
    pub config: ExperimentConfig,
    pub fidelities: Vec<(String, f64)>,
    pub average_fidelity: f64,
}

/// Writes `qpt_<gate>.json` and `chi_<gate>.csv` per gate plus `qpt_summary.json`.
pub fn cmd_qpt(cfg: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let opts = cfg.qpt_options();
    let gates = cfg.qpt.gates.iter().map(|g| g.resolve()).collect::<Result<Vec<_>, _>>()?;
    let results = gates
        .par_iter()
        .map(|(_, _, spec)| run_qpt(spec, cfg.device(), &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::new();
    let mut fidelities = Vec::new();
    for ((label, slug, _), r) in gates.iter().zip(&results) {
        let report = QptReport::new(label, &opts, r);
        write_file(out, &format!("qpt_{slug}.json"), &serde_json::to_string_pretty(&report).expect("report serializes"))?;
        write_file(out, &format!("chi_{slug}.csv"), &chi_csv(&r.chi))?;
        let _ = writeln!(s, "{label:<10} F_P = {:.6}", r.fidelity);
        fidelities.push((label.clone(), r.fidelity));
    }
    let average_fidelity = fidelities.iter().map(|f| f.1).sum::<f64>() / fidelities.len() as f64;
    let _ = writeln!(s, "average F_P over {} gates = {:.6}", fidelities.len(), average_fidelity);
    let summary = QptSummary { config: cfg.clone(), fidelities, average_fidelity };
    write_file(out, "qpt_summary.json", &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterleavedSummary {
    pub gate: String,
    pub fit: Option<FitReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbSummary {
    pub config: ExperimentConfig,
    pub reference: Option<FitReport>,
    pub reference_error: Option<String>,
    pub interleaved: Vec<InterleavedSummary>,
    pub mean_interleaved_fidelity: Option<f64>,
}

/// A fit that ended with p outside (0, 1] counts as failed.
fn converged(fit: &geomgate::Result<DecayFit>) -> geomgate::Result<DecayFit> {
    match fit {
        Ok(f) if !f.converged => Err(geomgate::Error::FitDiverged { iterations: f.iterations }),
        other => other.clone(),
    }
}

fn write_curve(out: &Path, stem: &str, run: &RbRun, report: Option<&FitReport>) -> Result<(), CliError> {
    write_file(out, &format!("{stem}.csv"), &run.curve.to_csv())?;
    if let Some(r) = report {
        write_file(out, &format!("{stem}_fit.json"), &serde_json::to_string_pretty(r).expect("report serializes"))?;
    }
    Ok(())
}

/// Writes `rb_reference.csv`/`_fit.json`, one pair per interleaved target, and `rb_summary.json`.
///
/// A failed fit still leaves its curve on disk; the error is returned after
/// every file has been written.
pub fn cmd_rb(cfg: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let noise = match cfg.device() {
        Some(d) => NoiseModel::Lindblad(*d),
        None => NoiseModel::Ideal,
    };
    let mut s = String::new();
    let mut failures = Vec::new();
    let mut reference_fit: Option<DecayFit> = None;
    let mut summary = RbSummary {
        config: cfg.clone(),
        reference: None,
        reference_error: None,
        interleaved: Vec::new(),
        mean_interleaved_fidelity: None,
    };

    if cfg.rb.reference || !cfg.rb.interleaved.is_empty() {
        let run = run_reference_rb(&cfg.rb_config(None), &noise)?;
        match converged(&run.fit) {
            Ok(fit) => {
                let report = FitReport::reference(&RbResult::reference(fit));
                let _ = writeln!(s, "reference  p = {:.6}  r = {:.6}  F_avg = {:.6}", report.p, report.r, report.f_avg);
                write_curve(out, "rb_reference", &run, Some(&report))?;
                summary.reference = Some(report);
                reference_fit = Some(fit);
            }
            Err(e) => {
                let _ = writeln!(s, "reference  fit failed: {e}");
                write_curve(out, "rb_reference", &run, None)?;
                summary.reference_error = Some(e.to_string());
                failures.push(format!("reference: {e}"));
            }
        }
    }

    let mut f_gs = Vec::new();
    for name in &cfg.rb.interleaved {
        let gate: NamedGate = name.parse()?;
        let run = run_interleaved_rb(&cfg.rb_config(Some(name)), &noise, reference_fit.as_ref())?;
        let stem = format!("rb_interleaved_{}", gate.slug());
        let result = converged(&run.interleaved.fit).and_then(|_| run.result.clone());
        match &result {
            Ok(res) => {
                let report = FitReport::interleaved(res).expect("interleaved result has a fit");
                let f_g = report.f_g.expect("interleaved report has F_g");
                let _ = writeln!(s, "{:<10} p_g = {:.6}  F_g = {:.6}", gate.name(), report.p_g.unwrap_or(f64::NAN), f_g);
                write_curve(out, &stem, &run.interleaved, Some(&report))?;
                f_gs.push(f_g);
                summary.interleaved.push(InterleavedSummary { gate: gate.name().into(), fit: Some(report), error: None });
            }
            Err(e) => {
                let _ = writeln!(s, "{:<10} fit failed: {e}", gate.name());
                write_curve(out, &stem, &run.interleaved, None)?;
                failures.push(format!("{}: {e}", gate.name()));
                summary.interleaved.push(InterleavedSummary { gate: gate.name().into(), fit: None, error: Some(e.to_string()) });
            }
        }
    }
    if !f_gs.is_empty() {
        let mean = f_gs.iter().sum::<f64>() / f_gs.len() as f64;
        let _ = writeln!(s, "mean F_g over {} gates = {:.6}", f_gs.len(), mean);
        summary.mean_interleaved_fidelity = Some(mean);
    }
    write_file(out, "rb_summary.json", &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;
    if failures.is_empty() {
        Ok(s)
    } else {
        Err(CliError::Fit { message: failures.join("; "), output: s })
    }
}
