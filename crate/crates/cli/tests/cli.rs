use std::path::Path;
use std::process::{Command, Output};

use geomgate::benchmarking::FitReport;
use geomgate::pulse::ScheduleDocument;
use geomgate::tomography::QptReport;
use geomgate_cli::commands::{QptSummary, RbSummary, SynthReport};
use geomgate_cli::ExperimentConfig;
use std::f64::consts::FRAC_PI_2;

fn geomgate(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_geomgate"));
    cmd.args(args).arg("--out").arg(dir.join("out")).env_remove("GEOMGATE_OUT");
    if let Some(c) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, c).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read<T: serde::de::DeserializeOwned>(dir: &Path, name: &str) -> T {
    let text = std::fs::read_to_string(dir.join("out").join(name)).unwrap();
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn synth_hadamard() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["synth"], Some(r#"{"synth": {"gate": "H"}}"#));
    assert!(o.status.success(), "{o:?}");
    let doc: ScheduleDocument = read(dir.path(), "schedule.json");
    let phases: Vec<f64> = doc.segments.iter().map(|s| s.phase_rad).collect();
    for (p, want) in phases.iter().zip([-FRAC_PI_2, 0.0, -FRAC_PI_2]) {
        assert!((p - want).abs() < 1e-12, "{phases:?}");
    }
    let report: SynthReport = read(dir.path(), "synth_report.json");
    assert!(report.phases.unwrap().dynamical.abs() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("out/bloch_path.csv")).unwrap();
    assert!(csv.starts_with("t_ns,x,y,z\n"));
    assert_eq!(csv.lines().count(), 3002);
    let _: ExperimentConfig = read(dir.path(), "config.json");
}

#[test]
fn synth_identity_has_zero_phases() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["synth"], Some(r#"{"synth": {"gate": "I"}}"#));
    assert!(o.status.success());
    let p = read::<SynthReport>(dir.path(), "synth_report.json").phases.unwrap();
    assert!(p.total.abs() < 1e-9 && p.dynamical.abs() < 1e-9 && p.geometric.abs() < 1e-9, "{p:?}");
}

#[test]
fn synth_rx_pi_prints_vanishing_dynamical_phase() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["synth"], Some(r#"{"synth": {"gate": "Rx(pi)"}}"#));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("dynamical phase")).unwrap();
    let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!(value.abs() < 1e-6, "{line}");
}

#[test]
fn synth_explicit_angles() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["synth"], Some(r#"{"synth": {"gate": {"theta": 1.1, "phi": -0.4, "gamma": 2.5}}}"#));
    assert!(o.status.success());
    let p = read::<SynthReport>(dir.path(), "synth_report.json").phases.unwrap();
    assert!((p.geometric + 1.25).abs() < 1e-6, "{p:?}");
}

#[test]
fn qpt_noiseless_and_device() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["qpt"], Some(r#"{"noise": false}"#));
    assert!(o.status.success());
    let s: QptSummary = read(dir.path(), "qpt_summary.json");
    assert_eq!(s.fidelities.len(), 8);
    assert!((s.average_fidelity - 1.0).abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["qpt"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("average F_P over 8 gates"));
    let s: QptSummary = read(dir.path(), "qpt_summary.json");
    assert!((0.993..=0.999).contains(&s.average_fidelity), "{}", s.average_fidelity);
    let r: QptReport = read(dir.path(), "qpt_H.json");
    assert_eq!(r.gate, "H");
    let csv = std::fs::read_to_string(dir.path().join("out/chi_H.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn qpt_shots_are_reproducible() {
    let cfg = r#"{"qpt": {"gates": ["Rx(pi/2)"]}, "mode": "shots:4096", "seed": 21}"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(geomgate(a.path(), &["qpt"], Some(cfg)).status.success());
    assert!(geomgate(b.path(), &["qpt", "--jobs", "1"], Some(cfg)).status.success());
    let ra = std::fs::read_to_string(a.path().join("out/qpt_Rx_pi_2.json")).unwrap();
    let rb = std::fs::read_to_string(b.path().join("out/qpt_Rx_pi_2.json")).unwrap();
    assert_eq!(ra, rb);
    let r: QptReport = serde_json::from_str(&ra).unwrap();
    assert_eq!((r.shots, r.seed), (Some(4096), 21));
}

#[test]
fn rb_noiseless_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["rb"], Some(r#"{"noise": false, "rb": {"randomizations": 10}}"#));
    assert!(o.status.success(), "{o:?}");
    let f: FitReport = read(dir.path(), "rb_reference_fit.json");
    assert!(1.0 - f.p < 1e-6);
}

#[test]
fn rb_device_reference_and_interleaved() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"rb": {"interleaved": ["I", "H", "Rx(pi)", "Rx(pi/2)", "Ry(pi)", "Ry(pi/2)", "Rz(pi)", "Rz(pi/2)"]}}"#;
    let o = geomgate(dir.path(), &["rb"], Some(cfg));
    assert!(o.status.success(), "{o:?}");
    let s: RbSummary = read(dir.path(), "rb_summary.json");
    let p = s.reference.as_ref().unwrap().p;
    assert!((0.990..=0.998).contains(&p), "{p}");
    let mean = s.mean_interleaved_fidelity.unwrap();
    assert!((0.994..=0.999).contains(&mean), "{mean}");
    for g in &s.interleaved {
        assert!(g.fit.as_ref().unwrap().f_g.is_some());
    }
    let f: FitReport = read(dir.path(), "rb_interleaved_Rz_pi_2_fit.json");
    assert!(f.p_g.is_some());
    let csv = std::fs::read_to_string(dir.path().join("out/rb_reference.csv")).unwrap();
    assert!(csv.starts_with("m,mean_survival,stderr,n_random\n1,"));
    assert!(stdout(&o).contains("mean F_g over 8 gates"));
}

#[test]
fn rb_is_identical_across_worker_counts() {
    let cfg = r#"{"mode": "shots:300", "seed": 5, "rb": {"sequence_lengths": [1, 4, 16, 64], "randomizations": 8, "interleaved": ["H"]}}"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(geomgate(a.path(), &["rb", "--jobs", "1"], Some(cfg)).status.success());
    assert!(geomgate(b.path(), &["rb", "--jobs", "3"], Some(cfg)).status.success());
    for f in ["rb_reference.csv", "rb_interleaved_H.csv", "rb_summary.json"] {
        let x = std::fs::read(a.path().join("out").join(f)).unwrap();
        let y = std::fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn fit_failure_exits_3_and_keeps_curves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"mode": "shots:1", "seed": 3, "rb": {"sequence_lengths": [1, 2, 3, 4], "randomizations": 2}}"#;
    let o = geomgate(dir.path(), &["rb"], Some(cfg));
    assert_eq!(o.status.code(), Some(3), "{o:?}");
    assert!(dir.path().join("out/rb_reference.csv").exists());
    let s: RbSummary = read(dir.path(), "rb_summary.json");
    assert!(s.reference_error.is_some());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["qpt"], Some("{\n  \"seed\": 1,\n  \"sede\": 2\n}"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = geomgate(dir.path(), &["rb"], Some(r#"{"rb": {"sequence_lengths": [3, 2, 1]}}"#));
    assert_eq!(o.status.code(), Some(2));
    let o = geomgate(dir.path(), &["synth"], Some(r#"{"synth": {"gate": "Rq"}}"#));
    assert_eq!(o.status.code(), Some(2));
    let o = geomgate(dir.path(), &["qpt", "--mode", "shots:-4"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_geomgate")).arg("synth").env("GEOMGATE_OUT", &out).output().unwrap();
    assert!(o.status.success());
    assert!(out.join("schedule.json").exists());
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = geomgate(dir.path(), &["selftest", "--seed", "7"], None);
    let b = geomgate(dir.path(), &["selftest", "--seed", "7"], None);
    assert!(a.status.success(), "{}", stdout(&a));
    let hash = |o: &Output| stdout(o).lines().find(|l| l.starts_with("report hash")).unwrap().to_string();
    assert_eq!(hash(&a), hash(&b));
    assert_eq!(stdout(&a).matches("[PASS]").count(), 7);
}

#[test]
fn selftest_detects_corrupted_clifford_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomgate(dir.path(), &["selftest", "--inject-fault", "clifford-table"], None);
    assert_eq!(o.status.code(), Some(4));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("[FAIL] clifford")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("[PASS] synthesis")));
}
