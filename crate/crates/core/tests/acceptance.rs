//! Acceptance suite. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line; the process exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geomgate::benchmarking::{
    average_fidelity, error_rate, fit_decay, fit_exponential, run_interleaved_rb_with, run_reference_rb,
    sample_sequence, DecayCurve, DecayPoint, InterleavedTarget, NoiseModel, RbConfig,
};
use geomgate::evolution::{
    angle_distance, bloch_trajectory, enclosed_solid_angle, evolve_propagator, evolve_unitary,
    phase_decomposition, schedule_propagator, DeviceParams, DEFAULT_DT_NS,
};
use geomgate::pulse::{synthesize, DEFAULT_SEGMENT_NS};
use geomgate::qcore::{clifford_group, phase_distance, Complex2x2, DensityMatrix, GateSpec, NamedGate, PureState};
use geomgate::tomography::{measure_expectations, run_qpt, MeasurementMode, QptOptions, ReadoutModel};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Matrix arithmetic kept separate from the library under test.
mod oracle {
    use super::*;

    pub type M = [[C64; 2]; 2];

    pub fn mul(a: &M, b: &M) -> M {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// cos(a)·I − i sin(a)·(n·σ)
    pub fn su2(n: [f64; 3], a: f64) -> M {
        let (s, c) = a.sin_cos();
        [
            [C64::new(c, -s * n[2]), C64::new(-s * n[1], -s * n[0])],
            [C64::new(s * n[1], -s * n[0]), C64::new(c, s * n[2])],
        ]
    }

    pub fn target(spec: &GateSpec) -> M {
        let (st, ct) = spec.theta.sin_cos();
        let (sp, cp) = spec.phi.sin_cos();
        su2([st * cp, st * sp, ct], spec.gamma / 2.0)
    }

    /// Three equatorial-axis rotations with areas (θ/2, π/2, π/2 − θ/2)
    /// and phases (φ − π/2, φ − γ/2 + π/2, φ − π/2), applied in order.
    pub fn three_segment(spec: &GateSpec) -> M {
        let areas = [spec.theta / 2.0, FRAC_PI_2, FRAC_PI_2 - spec.theta / 2.0];
        let phases = [spec.phi - FRAC_PI_2, spec.phi - spec.gamma / 2.0 + FRAC_PI_2, spec.phi - FRAC_PI_2];
        let mut u = su2([0.0, 0.0, 1.0], 0.0);
        for (a, p) in areas.iter().zip(phases) {
            u = mul(&su2([p.cos(), p.sin(), 0.0], *a), &u);
        }
        u
    }

    /// 1 − |Tr(U†V)|/2
    pub fn phase_gap(u: &M, v: &M) -> f64 {
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..2 {
            for k in 0..2 {
                tr += u[k][i].conj() * v[k][i];
            }
        }
        1.0 - tr.norm() / 2.0
    }

    pub fn frobenius(u: &M, v: &M) -> f64 {
        u.iter().flatten().zip(v.iter().flatten()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn paulis() -> [M; 3] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        [[[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]]
    }

    pub fn dagger(u: &M) -> M {
        [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_spec(rng: &mut ChaCha8Rng) -> GateSpec {
    GateSpec {
        theta: rng.random_range(0.0..=PI),
        phi: rng.random_range(-PI..PI),
        gamma: rng.random_range(-2.0 * PI + 1e-9..=2.0 * PI),
    }
}

fn spec_strategy() -> impl Strategy<Value = GateSpec> {
    (0.0..=PI, -PI..PI, (-2.0 * PI + 1e-9)..=(2.0 * PI)).prop_map(|(theta, phi, gamma)| GateSpec { theta, phi, gamma })
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn gate_synthesis() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for g in NamedGate::ALL {
        let spec = g.spec();
        let u = schedule_propagator(&synthesize(&spec, DEFAULT_SEGMENT_NS).unwrap());
        let target = Complex2x2(oracle::target(&spec));
        worst = worst.max(phase_distance(&u, &target).unwrap());
        worst = worst.max(phase_distance(&u, &g.standard_matrix()).unwrap());
    }
    let elapsed = start.elapsed();
    let prop = runner(500).run(&spec_strategy(), |spec| {
        let target = oracle::target(&spec);
        let built = schedule_propagator(&synthesize(&spec, DEFAULT_SEGMENT_NS).unwrap());
        let d_lib = oracle::phase_gap(&built.0, &target);
        let d_protocol = oracle::phase_gap(&oracle::three_segment(&spec), &target);
        prop_assert!(d_lib < 1e-10 && d_protocol < 1e-10, "{spec:?}: {d_lib:e} {d_protocol:e}");
        Ok(())
    });
    let ok = worst < 1e-10 && elapsed < Duration::from_secs(1) && prop.is_ok();
    outcome(
        ok,
        format!("8 named gates worst phase distance {worst:.1e} in {}; 500 random specs {}", secs(elapsed), match prop {
            Ok(()) => "all < 1e-10".to_string(),
            Err(e) => e.to_string(),
        }),
    )
}

fn integrator_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_spec(&mut rng);
        let sched = synthesize(&spec, DEFAULT_SEGMENT_NS).unwrap();
        let rk4 = evolve_propagator(&sched, DEFAULT_DT_NS).unwrap();
        worst = worst.max(oracle::frobenius(&rk4.0, &oracle::three_segment(&spec)));
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-8 && elapsed < Duration::from_secs(30),
        format!("200 specs at dt = {DEFAULT_DT_NS} ns, worst ‖U_rk4 − U_exact‖ = {worst:.1e} in {}", secs(elapsed)),
    )
}

fn geometric_structure() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut dynamical, mut geometric, mut omega): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..200 {
        let spec = random_spec(&mut rng);
        let sched = synthesize(&spec, DEFAULT_SEGMENT_NS).unwrap();
        let (plus, minus) = spec.eigenstates();
        for (psi, sign) in [(plus, -1.0), (minus, 1.0)] {
            let traj = evolve_unitary(&sched, &psi, DEFAULT_DT_NS).unwrap();
            let r = phase_decomposition(&traj).unwrap();
            dynamical = dynamical.max(r.dynamical.abs());
            geometric = geometric.max(angle_distance(r.geometric, sign * spec.gamma / 2.0));
            if i < 50 && sign < 0.0 {
                let w = enclosed_solid_angle(&bloch_trajectory(&traj).unwrap()).unwrap();
                omega = omega.max((w.abs() - spec.gamma.abs()).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        dynamical < 1e-6 && geometric < 1e-6 && omega < 1e-3 && elapsed < Duration::from_secs(60),
        format!(
            "200 specs × 2 eigenstates: max |dynamical| {dynamical:.1e}, max geometric error {geometric:.1e}; \
             50 specs max ||Ω| − |γ|| {omega:.1e}; {}",
            secs(elapsed)
        ),
    )
}

fn noiseless_qpt() -> Outcome {
    let exact = QptOptions::default();
    let shots = QptOptions { mode: MeasurementMode::Shots(10_000), ..QptOptions::default() };
    let mut worst_exact: f64 = 0.0;
    let mut worst_shots: f64 = 0.0;
    for g in NamedGate::ALL {
        worst_exact = worst_exact.max((run_qpt(&g.spec(), None, &exact).unwrap().fidelity - 1.0).abs());
        worst_shots = worst_shots.max((run_qpt(&g.spec(), None, &shots).unwrap().fidelity - 1.0).abs());
    }
    let prop = runner(100).run(&spec_strategy(), |spec| {
        let f = run_qpt(&spec, None, &exact).unwrap().fidelity;
        prop_assert!((f - 1.0).abs() < 1e-6, "{spec:?}: F = {f}");
        Ok(())
    });
    outcome(
        worst_exact < 1e-6 && worst_shots <= 5e-3 && prop.is_ok(),
        format!(
            "8 gates exact max |F − 1| {worst_exact:.1e}; 10^4 shots (seed 0) max |F − 1| {worst_shots:.2e}; 100 random specs exact {}",
            if prop.is_ok() { "all within 1e-6".to_string() } else { format!("{:?}", prop.err()) }
        ),
    )
}

fn noisy_qpt() -> Outcome {
    let start = Instant::now();
    let device = DeviceParams::default();
    let device_values = device.t1_us == 19.0 && device.t2_star_us == 10.0 && DEFAULT_SEGMENT_NS == 10.0;
    let fs: Vec<f64> = NamedGate::ALL
        .iter()
        .map(|g| run_qpt(&g.spec(), Some(&device), &QptOptions::default()).unwrap().fidelity)
        .collect();
    let mean = fs.iter().sum::<f64>() / fs.len() as f64;
    let elapsed = start.elapsed();
    outcome(
        device_values && (0.993..=0.999).contains(&mean) && elapsed < Duration::from_secs(120),
        format!(
            "T1 = {} µs, T2* = {} µs, T = {DEFAULT_SEGMENT_NS} ns: average F_P = {mean:.6} over 8 gates \
             (range {:.6}..{:.6}), band [0.993, 0.999]; {}",
            device.t1_us,
            device.t2_star_us,
            fs.iter().cloned().fold(1.0, f64::min),
            fs.iter().cloned().fold(0.0, f64::max),
            secs(elapsed)
        ),
    )
}

fn device_rb_config() -> RbConfig {
    RbConfig { sequence_lengths: (1..=100).collect(), randomizations: 50, mode: MeasurementMode::Exact, seed: 0, ..RbConfig::default() }
}

fn reference_rb() -> Outcome {
    let start = Instant::now();
    let run = run_reference_rb(&device_rb_config(), &NoiseModel::Lindblad(DeviceParams::default())).unwrap();
    let fit = run.fit.unwrap();
    let elapsed = start.elapsed();
    let r = error_rate(fit.p);
    let p_ok = (0.990..=0.998).contains(&fit.p);
    let r_ok = (0.003 / 2.0..=0.003 * 2.0).contains(&r);
    let identity_r = (error_rate(0.994) - 0.003).abs() < 1e-15;
    let identity_f = (average_fidelity(0.994) - 0.997).abs() < 1e-15 && (1.0 - error_rate(fit.p) - average_fidelity(fit.p)).abs() < 1e-15;
    outcome(
        fit.converged && p_ok && r_ok && identity_r && identity_f && elapsed < Duration::from_secs(300),
        format!(
            "m = 1..100, 50 randomizations, exact, seed 0: p = {:.6} (band [0.990, 0.998] {}), r = {r:.6} \
             (factor-2 band [0.0015, 0.006] {}), A = {:.3}, B = {:.3}; p = 0.994 gives r = {:.6}, F_avg = {:.6}; {}",
            fit.p,
            if p_ok { "ok" } else { "missed" },
            if r_ok { "ok" } else { "missed" },
            fit.a,
            fit.b,
            error_rate(0.994),
            average_fidelity(0.994),
            secs(elapsed)
        ),
    )
}

fn interleaved_rb() -> Outcome {
    let start = Instant::now();
    let small = RbConfig { sequence_lengths: vec![1, 2, 4, 8, 16, 32, 64, 128], randomizations: 20, ..RbConfig::default() };
    let mut worst_synthetic: f64 = 0.0;
    for (name, lambda) in [("H", 0.002), ("Rx(pi/2)", 0.006), ("Rz(pi)", 0.02)] {
        let target = InterleavedTarget { extra_depolarizing: lambda, ..InterleavedTarget::named(name).unwrap() };
        let f_g = run_interleaved_rb_with(&small, &NoiseModel::Ideal, &target, None).unwrap().result.unwrap().f_g.unwrap();
        worst_synthetic = worst_synthetic.max((f_g - (1.0 - lambda / 2.0)).abs());
    }

    let cfg = device_rb_config();
    let noise = NoiseModel::Lindblad(DeviceParams::default());
    let reference = run_reference_rb(&cfg, &noise).unwrap().fit.unwrap();
    let f_gs: Vec<f64> = NamedGate::ALL
        .iter()
        .map(|g| {
            let target = InterleavedTarget::named(g.name()).unwrap();
            run_interleaved_rb_with(&cfg, &noise, &target, Some(&reference)).unwrap().result.unwrap().f_g.unwrap()
        })
        .collect();
    let mean = f_gs.iter().sum::<f64>() / f_gs.len() as f64;
    let elapsed = start.elapsed();
    outcome(
        worst_synthetic <= 1e-3 && (0.994..=0.999).contains(&mean) && elapsed < Duration::from_secs(600),
        format!(
            "synthetic λ ∈ {{0.002, 0.006, 0.02}}: max |F_g − (1 − λ/2)| = {worst_synthetic:.1e}; \
             device mean F_g = {mean:.6} over 8 gates (band [0.994, 0.999]); {}",
            secs(elapsed)
        ),
    )
}

fn fitter_calibration() -> Outcome {
    let ms: Vec<f64> = (1..=100).map(f64::from).collect();
    let truth: Vec<f64> = ms.iter().map(|&m| 0.5 * 0.99f64.powf(m) + 0.5).collect();
    let exact = fit_exponential(&ms, &truth, None).unwrap();
    let exact_err = (exact.p - 0.99).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut errs: Vec<f64> = (0..100)
        .map(|_| {
            let points = truth
                .iter()
                .enumerate()
                .map(|(i, &q)| {
                    let k = Binomial::new(1000, q).unwrap().sample(&mut rng);
                    DecayPoint::from_values(i + 1, vec![k as f64 / 1000.0])
                })
                .collect();
            (fit_decay(&DecayCurve { points, shots: Some(1000) }).unwrap().p - 0.99).abs()
        })
        .collect();
    errs.sort_by(f64::total_cmp);
    let p95 = errs[94];
    outcome(
        exact_err < 1e-6 && p95 <= 2e-3,
        format!("exact decay |Δp| = {exact_err:.1e}; 1000-shot binomial, 100 trials: 95th percentile |Δp| = {p95:.2e}"),
    )
}

fn clifford_suite() -> Outcome {
    let start = Instant::now();
    let g = clifford_group();
    let check = g.check();

    // each element must map every Pauli to ± a Pauli under conjugation
    let paulis = oracle::paulis();
    let normalizes = g.elements().iter().all(|e| {
        let u = e.unitary.0;
        paulis.iter().all(|p| {
            let image = oracle::mul(&oracle::mul(&u, p), &oracle::dagger(&u));
            paulis.iter().any(|q| {
                let neg = q.map(|row| row.map(|z| -z));
                oracle::frobenius(&image, q) < 1e-10 || oracle::frobenius(&image, &neg) < 1e-10
            })
        })
    });
    let distinct = (0..g.len()).all(|a| (0..a).all(|b| oracle::phase_gap(&g.element(a).unitary.0, &g.element(b).unitary.0) > 1e-3));

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for i in 0..1000u64 {
        let seq = sample_sequence(rng.random_range(1..=100), i);
        let mut u = oracle::su2([0.0, 0.0, 1.0], 0.0);
        for c in seq.indices(None) {
            u = oracle::mul(&g.element(c).unitary.0, &u);
        }
        worst = worst.max(oracle::phase_gap(&u, &oracle::su2([0.0, 0.0, 1.0], 0.0)));
    }
    let elapsed = start.elapsed();
    outcome(
        g.len() == 24 && check.passed() && normalizes && distinct && worst < 1e-10 && elapsed < Duration::from_secs(10),
        format!(
            "{} elements, closure/inverse failures {}/{}, Pauli normalizer {}, 1000 recoveries worst phase distance {worst:.1e}; {}",
            g.len(),
            check.closure_failures,
            check.inverse_failures,
            if normalizes && distinct { "ok" } else { "violated" },
            secs(elapsed)
        ),
    )
}

fn readout_model() -> Outcome {
    let ro = ReadoutModel::from_device(&DeviceParams::default());
    let m = ro.confusion();
    let want = [[0.980, 0.020], [0.064, 0.936]];
    let confusion_ok = m.iter().flatten().zip(want.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-12);

    let n = 1_000_000u32;
    let states = [
        PureState::zero().to_density(),
        PureState::one().to_density(),
        PureState::from_bloch_angles(FRAC_PI_2, 0.0).to_density(),
        PureState::from_bloch_angles(FRAC_PI_2, FRAC_PI_2).to_density(),
        DensityMatrix::from_bloch([0.3, -0.2, 0.5]),
    ];
    let mut worst_z: f64 = 0.0;
    for (i, rho) in states.iter().enumerate() {
        let exact = rho.bloch_vector();
        let est = measure_expectations(rho, MeasurementMode::Shots(n), Some(&ro), i as u64);
        for k in 0..3 {
            // observed +1 frequency before correction, and the propagated binomial error
            let p = (1.0 + exact[k]) / 2.0;
            let q = want[0][0] * p + want[1][0] * (1.0 - p);
            let sigma = 2.0 * (q * (1.0 - q) / n as f64).sqrt() / (want[0][0] + want[1][1] - 1.0);
            worst_z = worst_z.max((est[k] - exact[k]).abs() / sigma);
        }
    }
    outcome(
        confusion_ok && worst_z < 3.0,
        format!(
            "confusion [[{:.3}, {:.3}], [{:.3}, {:.3}]]; 5 states × 3 axes at 10^6 shots, max |bias|/σ = {worst_z:.2}",
            m[0][0], m[0][1], m[1][0], m[1][1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("gate synthesis exactness", gate_synthesis),
        ("integrator agreement", integrator_agreement),
        ("geometric structure", geometric_structure),
        ("noiseless process tomography", noiseless_qpt),
        ("noisy process tomography", noisy_qpt),
        ("reference randomized benchmarking", reference_rb),
        ("interleaved randomized benchmarking", interleaved_rb),
        ("decay fitter calibration", fitter_calibration),
        ("Clifford group", clifford_suite),
        ("readout model", readout_model),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("{} {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
