//! Reduced-scale invariant checks across all modules.

use std::f64::consts::PI;

use geomgate::benchmarking::{fit_exponential, run_reference_rb, sample_sequence, NoiseModel, RbConfig};
use geomgate::evolution::{
    angle_distance, enclosed_solid_angle, bloch_trajectory, evolve_lindblad, evolve_propagator, evolve_unitary,
    phase_decomposition, schedule_propagator, DeviceParams, DEFAULT_DT_NS,
};
use geomgate::pulse::{synthesize, DEFAULT_SEGMENT_NS};
use geomgate::qcore::{clifford_group, phase_distance, CliffordGroup, Complex2x2, GateSpec, NamedGate, PureState};
use geomgate::tomography::{measure_expectations, run_qpt, MeasurementMode, QptOptions, ReadoutModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Deliberate corruption used to check that the suites detect faults.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Overwrite one entry of the Clifford composition table.
    CliffordTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    /// SHA-256 over the seed and suite results.
    pub hash: String,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!("[{}] {:<12} {}\n", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail));
        }
        out.push_str(&format!("report hash {}\n", self.hash));
        out
    }
}

fn random_spec(rng: &mut ChaCha8Rng) -> GateSpec {
    GateSpec {
        theta: rng.random_range(0.0..=PI),
        phi: rng.random_range(-PI..PI),
        gamma: rng.random_range(-2.0 * PI + 1e-9..=2.0 * PI),
    }
}

fn suite(name: &str, f: impl FnOnce() -> Result<String, String>) -> SuiteResult {
    match f() {
        Ok(detail) => SuiteResult { name: name.into(), passed: true, detail },
        Err(detail) => SuiteResult { name: name.into(), passed: false, detail },
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn clifford_suite(fault: Option<Fault>) -> Result<String, String> {
    let group = match fault {
        Some(Fault::CliffordTable) => {
            let mut g: CliffordGroup = clifford_group().clone();
            g.tamper_composition(3, 5, (g.compose(3, 5) + 1) % 24);
            g
        }
        None => clifford_group().clone(),
    };
    let c = group.check();
    check(c.passed(), || format!("{c:?}"))?;
    Ok(format!("{} elements, closure and inverses exhaustive", group.len()))
}

fn synthesis_suite() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for g in NamedGate::ALL {
        let sched = synthesize(&g.spec(), DEFAULT_SEGMENT_NS).map_err(|e| e.to_string())?;
        let d = phase_distance(&schedule_propagator(&sched), &g.standard_matrix()).map_err(|e| e.to_string())?;
        worst = worst.max(d);
    }
    check(worst < 1e-10, || format!("phase distance {worst:e}"))?;
    Ok(format!("8 gates, worst phase distance {worst:.1e}"))
}

fn integrator_suite(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let sched = synthesize(&random_spec(rng), DEFAULT_SEGMENT_NS).map_err(|e| e.to_string())?;
        let rk4 = evolve_propagator(&sched, DEFAULT_DT_NS).map_err(|e| e.to_string())?;
        worst = worst.max((rk4 - schedule_propagator(&sched)).norm());
    }
    check(worst < 1e-8, || format!("RK4 deviation {worst:e}"))?;
    Ok(format!("20 specs, worst RK4 deviation {worst:.1e}"))
}

fn geometry_suite(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst_dyn: f64 = 0.0;
    let mut worst_geo: f64 = 0.0;
    let mut worst_omega: f64 = 0.0;
    for _ in 0..10 {
        let spec = random_spec(rng);
        let sched = synthesize(&spec, DEFAULT_SEGMENT_NS).map_err(|e| e.to_string())?;
        let (plus, minus) = spec.eigenstates();
        for (psi, sign) in [(plus, -1.0), (minus, 1.0)] {
            let traj = evolve_unitary(&sched, &psi, DEFAULT_DT_NS).map_err(|e| e.to_string())?;
            let r = phase_decomposition(&traj).map_err(|e| e.to_string())?;
            worst_dyn = worst_dyn.max(r.dynamical.abs());
            worst_geo = worst_geo.max(angle_distance(r.geometric, sign * spec.gamma / 2.0));
            if sign < 0.0 {
                let omega = enclosed_solid_angle(&bloch_trajectory(&traj).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                worst_omega = worst_omega.max((omega.abs() - spec.gamma.abs()).abs());
            }
        }
    }
    check(worst_dyn < 1e-6 && worst_geo < 1e-6 && worst_omega < 1e-3, || {
        format!("dynamical {worst_dyn:e}, geometric {worst_geo:e}, solid angle {worst_omega:e}")
    })?;
    Ok(format!("10 specs, |dyn| ≤ {worst_dyn:.1e}, geometric error ≤ {worst_geo:.1e}, |Ω|−|γ| ≤ {worst_omega:.1e}"))
}

fn lindblad_suite(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let device = DeviceParams { t1_us: 0.5, t2_star_us: 0.3, ..Default::default() };
    let sched = synthesize(&random_spec(rng), DEFAULT_SEGMENT_NS).map_err(|e| e.to_string())?;
    let traj = evolve_lindblad(&sched, &PureState::zero().to_density(), &device, DEFAULT_DT_NS).map_err(|e| e.to_string())?;
    let states = traj.mixed_states().ok_or("expected density matrices")?;
    let mut trace_err: f64 = 0.0;
    let mut min_eig: f64 = 1.0;
    for r in states {
        trace_err = trace_err.max((r.trace() - 1.0).abs());
        min_eig = min_eig.min(r.eigenvalues()[0]);
    }
    check(trace_err < 1e-9 && min_eig > -1e-9, || format!("trace error {trace_err:e}, min eigenvalue {min_eig:e}"))?;
    Ok(format!("{} steps, trace error {trace_err:.1e}, min eigenvalue {min_eig:.1e}", states.len()))
}

fn tomography_suite(seed: u64) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for g in NamedGate::ALL {
        let r = run_qpt(&g.spec(), None, &QptOptions::default()).map_err(|e| e.to_string())?;
        worst = worst.max((r.fidelity - 1.0).abs());
    }
    check(worst < 1e-6, || format!("noiseless F_P error {worst:e}"))?;
    let ro = ReadoutModel::from_device(&DeviceParams::default());
    let n = 100_000;
    let z = measure_expectations(&PureState::zero().to_density(), MeasurementMode::Shots(n), Some(&ro), seed)[2];
    let sigma = ro.corrected_expectation_stddev(1.0, n);
    check((z - 1.0).abs() < 4.0 * sigma, || format!("corrected ⟨σz⟩ = {z}, σ = {sigma:e}"))?;
    Ok(format!("8 gates noiseless F_P error {worst:.1e}; corrected ⟨σz⟩ = {z:.5}"))
}

fn benchmarking_suite(seed: u64) -> Result<String, String> {
    let g = clifford_group();
    for s in 0..100 {
        let seq = sample_sequence(20, seed.wrapping_add(s));
        let u = seq.indices(None).iter().fold(Complex2x2::identity(), |acc, &c| g.element(c).unitary * acc);
        let d = phase_distance(&u, &Complex2x2::identity()).map_err(|e| e.to_string())?;
        check(d < 1e-10, || format!("sequence product off identity by {d:e}"))?;
    }
    let ms: Vec<f64> = (1..=100).map(f64::from).collect();
    let ys: Vec<f64> = ms.iter().map(|&m| 0.5 * 0.99f64.powf(m) + 0.5).collect();
    let fit = fit_exponential(&ms, &ys, None).map_err(|e| e.to_string())?;
    check((fit.p - 0.99).abs() < 1e-6, || format!("synthetic fit p = {}", fit.p))?;
    let lambda = 0.01;
    let cfg = RbConfig { sequence_lengths: vec![1, 4, 16, 64], randomizations: 5, seed, ..Default::default() };
    let run = run_reference_rb(&cfg, &NoiseModel::Depolarizing(lambda)).map_err(|e| e.to_string())?;
    let p = run.fit.map_err(|e| e.to_string())?.p;
    check((p - (1.0 - lambda)).abs() < 1e-4, || format!("depolarizing RB p = {p}"))?;
    Ok(format!("100 recoveries exact; synthetic p = {:.8}; depolarizing p = {p:.6}", fit.p))
}

pub fn run_selftest(seed: u64, fault: Option<Fault>) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites = vec![
        suite("clifford", || clifford_suite(fault)),
        suite("synthesis", synthesis_suite),
        suite("integrator", || integrator_suite(&mut rng)),
        suite("geometry", || geometry_suite(&mut rng)),
        suite("lindblad", || lindblad_suite(&mut rng)),
        suite("tomography", || tomography_suite(seed)),
        suite("benchmarking", || benchmarking_suite(seed)),
    ];
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(serde_json::to_vec(&suites).expect("suites serialize"));
    let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    SelftestReport { seed, suites, hash }
}
