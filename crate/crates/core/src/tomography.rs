//! Quantum process tomography of simulated gate channels.
//!
//! Four input states are prepared from |0⟩ by I, Rx(π), Rx(π/2) and Ry(π/2),
//! sent through the gate, and reconstructed by Pauli-expectation state
//! tomography. The χ matrix over E = (I, σx, σy, σz) then follows from linear
//! inversion of ε(ρ) = Σ_mn χ_mn E_m ρ E_n†. The Pauli basis is hermitian, so
//! E_n† = E_n and the map can equally be written with E_n.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{DeviceParams, PauliTransferMatrix};
use crate::pulse::{synthesize, DEFAULT_SEGMENT_NS};
use crate::evolution::{schedule_propagator, DEFAULT_DT_NS};
use crate::qcore::{Complex2x2, DensityMatrix, GateSpec, NamedGate, PureState};

/// Shots per measurement basis when shot mode is chosen without a count.
pub const DEFAULT_SHOTS: u32 = 4096;

/// Exact expectation values, or a finite number of shots per measurement setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementMode {
    Exact,
    Shots(u32),
}

impl fmt::Display for MeasurementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementMode::Exact => f.write_str("exact"),
            MeasurementMode::Shots(n) => write!(f, "shots:{n}"),
        }
    }
}

impl FromStr for MeasurementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exact" {
            return Ok(MeasurementMode::Exact);
        }
        if s == "shots" {
            return Ok(MeasurementMode::Shots(DEFAULT_SHOTS));
        }
        let n = s
            .strip_prefix("shots:")
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::InvalidConfig(format!("mode must be `exact` or `shots:<n>` with n ≥ 1, got `{s}`")))?;
        Ok(MeasurementMode::Shots(n))
    }
}

impl Serialize for MeasurementMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MeasurementMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// RNG for one independent stream of a seeded run.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Assignment errors of a single-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    /// P(read 0 | prepared 0)
    pub f0: f64,
    /// P(read 1 | prepared 1)
    pub f1: f64,
}

impl ReadoutModel {
    pub fn new(f0: f64, f1: f64) -> Result<Self> {
        for f in [f0, f1] {
            if !(f > 0.5 && f <= 1.0) {
                return Err(Error::InvalidDevice(format!("readout fidelity {f} outside (0.5, 1]")));
            }
        }
        Ok(Self { f0, f1 })
    }

    pub fn from_device(device: &DeviceParams) -> Self {
        Self { f0: device.readout_f0, f1: device.readout_f1 }
    }

    pub fn perfect() -> Self {
        Self { f0: 1.0, f1: 1.0 }
    }

    /// `m[j][k]` = P(read k | prepared j); rows sum to 1.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[self.f0, 1.0 - self.f0], [1.0 - self.f1, self.f1]]
    }

    /// Measured outcome distribution for a true one.
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let m = self.confusion();
        [p[0] * m[0][0] + p[1] * m[1][0], p[0] * m[0][1] + p[1] * m[1][1]]
    }

    /// Standard deviation of a corrected ⟨σ⟩ estimate from `shots` shots when
    /// the true probability of the +1 outcome is `p_plus`.
    pub fn corrected_expectation_stddev(&self, p_plus: f64, shots: u32) -> f64 {
        let q = self.apply([p_plus, 1.0 - p_plus])[0];
        2.0 * (q * (1.0 - q) / f64::from(shots)).sqrt() / (self.f0 + self.f1 - 1.0)
    }

    /// Confusion-matrix inversion: the true distribution that produces `q`.
    /// Not clipped, so it stays linear (and unbiased).
    pub fn correct(&self, q: [f64; 2]) -> [f64; 2] {
        let d = self.f0 + self.f1 - 1.0;
        let p0 = (q[0] - (1.0 - self.f1) * (q[0] + q[1])) / d;
        [p0, q[0] + q[1] - p0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    X,
    Y,
    Z,
}

const BASES: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

impl Basis {
    fn operator(self) -> Complex2x2 {
        match self {
            Basis::X => Complex2x2::sigma_x(),
            Basis::Y => Complex2x2::sigma_y(),
            Basis::Z => Complex2x2::sigma_z(),
        }
    }

    /// Rotation that maps this basis onto z before a z measurement.
    fn pre_rotation(self) -> Option<GateSpec> {
        use std::f64::consts::FRAC_PI_2;
        match self {
            Basis::X => Some(GateSpec { theta: FRAC_PI_2, phi: FRAC_PI_2, gamma: -FRAC_PI_2 }),
            Basis::Y => Some(GateSpec { theta: FRAC_PI_2, phi: 0.0, gamma: FRAC_PI_2 }),
            Basis::Z => None,
        }
    }
}

/// Samples one basis: number of `+1` outcomes after readout, corrected to ⟨σ⟩.
fn sample_expectation(
    p_plus: f64,
    shots: u32,
    readout: Option<&ReadoutModel>,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let p_plus = p_plus.clamp(0.0, 1.0);
    let n = shots as u64;
    let true_plus = Binomial::new(n, p_plus).expect("valid binomial").sample(rng);
    let Some(ro) = readout else {
        return 2.0 * true_plus as f64 / n as f64 - 1.0;
    };
    // each shot is misassigned independently
    let kept = Binomial::new(true_plus, ro.f0).expect("valid binomial").sample(rng);
    let flipped = Binomial::new(n - true_plus, 1.0 - ro.f1).expect("valid binomial").sample(rng);
    let read_plus = (kept + flipped) as f64 / n as f64;
    let p = ro.correct([read_plus, 1.0 - read_plus]);
    p[0] - p[1]
}

fn measure_with(
    rho: &DensityMatrix,
    mode: MeasurementMode,
    readout: Option<&ReadoutModel>,
    rng: &mut ChaCha8Rng,
    rotate: &mut impl FnMut(Basis, &DensityMatrix) -> Result<DensityMatrix>,
) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, b) in BASES.into_iter().enumerate() {
        out[k] = match mode {
            MeasurementMode::Exact => rho.expectation(&b.operator()).re,
            MeasurementMode::Shots(shots) => {
                let rotated = rotate(b, rho)?;
                sample_expectation(rotated.ground_population(), shots, readout, rng)
            }
        };
    }
    Ok(out)
}

/// (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of `rho`, exactly or from simulated shots.
///
/// Shot mode rotates each basis onto z with ideal pulses, draws binomial
/// outcomes, applies the readout confusion per shot, and then inverts the
/// confusion matrix.
pub fn measure_expectations(
    rho: &DensityMatrix,
    mode: MeasurementMode,
    readout: Option<&ReadoutModel>,
    seed: u64,
) -> [f64; 3] {
    let mut rng = stream_rng(seed, 0);
    let mut ideal = |b: Basis, r: &DensityMatrix| -> Result<DensityMatrix> {
        Ok(match b.pre_rotation() {
            Some(spec) => r.conjugate_by(&spec.unitary()),
            None => *r,
        })
    };
    measure_with(rho, mode, readout, &mut rng, &mut ideal).expect("ideal rotations cannot fail")
}

/// A state rebuilt from its Pauli expectations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructedState {
    pub rho: DensityMatrix,
    /// Whether the Bloch vector had to be shrunk onto the unit sphere.
    pub projected: bool,
}

/// ρ = (I + r·σ)/2, with |r| > 1 rescaled radially to 1.
pub fn reconstruct_state(r: [f64; 3]) -> ReconstructedState {
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if len > 1.0 {
        let s = 1.0 / len;
        return ReconstructedState { rho: DensityMatrix::from_bloch(r.map(|x| x * s)), projected: true };
    }
    ReconstructedState { rho: DensityMatrix::from_bloch(r), projected: false }
}

/// χ over (I, σx, σy, σz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessMatrix(pub [[C64; 4]; 4]);

impl ProcessMatrix {
    /// Eigenvalue floor for noiseless reconstructions.
    pub const CP_TOL_EXACT: f64 = 1e-6;
    /// Eigenvalue floor for shot-noise reconstructions.
    pub const CP_TOL_SHOTS: f64 = 1e-2;

    /// χ_id = u u† with u_m = Tr(E_m U)/2. Invariant under U → e^{iα}U.
    pub fn from_unitary(u: &Complex2x2) -> Self {
        let basis = Complex2x2::pauli_basis();
        let coeff: [C64; 4] = std::array::from_fn(|m| (basis[m] * *u).trace() / 2.0);
        Self(std::array::from_fn(|m| std::array::from_fn(|n| coeff[m] * coeff[n].conj())))
    }

    fn to_nalgebra(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| self.0[i][j])
    }

    fn from_nalgebra(m: &Matrix4<C64>) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])))
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += (self.0[i][j] - self.0[j][i].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < 1e-9
    }

    /// (χ + χ†)/2
    pub fn hermitized(&self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| (self.0[i][j] + self.0[j][i].conj()) / 2.0)))
    }

    /// Eigenvalues of the hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = self.hermitized().to_nalgebra().symmetric_eigen();
        let mut v: [f64; 4] = std::array::from_fn(|i| eig.eigenvalues[i]);
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.eigenvalues()[0] >= -tol
    }

    /// Nearest CP map by eigenvalue clipping: drop negative eigenvalues, renormalize the trace.
    pub fn clipped_to_cp(&self) -> Self {
        let eig = self.hermitized().to_nalgebra().symmetric_eigen();
        let vals = eig.eigenvalues.map(|x| x.max(0.0));
        let total: f64 = vals.iter().sum();
        let vals = if total > 0.0 { vals / total } else { vals };
        let q = &eig.eigenvectors;
        let d = Matrix4::from_diagonal(&vals.map(|x| C64::new(x, 0.0)));
        Self::from_nalgebra(&(q * d * q.adjoint()))
    }

    /// ε_χ(ρ) = Σ_mn χ_mn E_m ρ E_n
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let e = Complex2x2::pauli_basis();
        let mut out = Complex2x2::zero();
        for m in 0..4 {
            for n in 0..4 {
                out = out + (e[m] * *rho.matrix() * e[n]).scale(self.0[m][n]);
            }
        }
        DensityMatrix(out)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += (self.0[i][j] - other.0[i][j]).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn real_part(&self) -> [[f64; 4]; 4] {
        self.0.map(|row| row.map(|z| z.re))
    }

    pub fn imag_part(&self) -> [[f64; 4]; 4] {
        self.0.map(|row| row.map(|z| z.im))
    }
}

/// The four tomography inputs |0⟩, |1⟩, (|0⟩ − i|1⟩)/√2, (|0⟩ + |1⟩)/√2 (up to phase).
pub fn preparation_gates() -> [GateSpec; 4] {
    [NamedGate::I, NamedGate::RxPi, NamedGate::RxHalfPi, NamedGate::RyHalfPi].map(|g| g.spec())
}

pub fn prepare_input_states() -> [PureState; 4] {
    preparation_gates().map(|g| PureState::zero().evolve(&g.unitary()))
}

/// Linear inversion of ε(ρ_i) = Σ χ_mn E_m ρ_i E_n over the 16 unknowns, then hermitization.
pub fn reconstruct_chi(inputs: &[DensityMatrix; 4], outputs: &[DensityMatrix; 4]) -> Result<ProcessMatrix> {
    let e = Complex2x2::pauli_basis();
    let mut a = DMatrix::<C64>::zeros(16, 16);
    let mut b = DVector::<C64>::zeros(16);
    for (i, (rho, out)) in inputs.iter().zip(outputs).enumerate() {
        for m in 0..4 {
            for n in 0..4 {
                let term = e[m] * *rho.matrix() * e[n];
                for r in 0..2 {
                    for c in 0..2 {
                        a[(i * 4 + r * 2 + c, m * 4 + n)] = term.get(r, c);
                    }
                }
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                b[i * 4 + r * 2 + c] = out.matrix().get(r, c);
            }
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::SingularSystem);
    }
    let x = svd.solve(&b, 0.0).map_err(|_| Error::SingularSystem)?;
    let chi = ProcessMatrix(std::array::from_fn(|m| std::array::from_fn(|n| x[m * 4 + n])));
    Ok(chi.hermitized())
}

/// F_P = Tr(χ χ_id)
pub fn process_fidelity(chi: &ProcessMatrix, chi_ideal: &ProcessMatrix) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            tr += chi.0[i][j] * chi_ideal.0[j][i];
        }
    }
    tr.re
}

/// Simulation settings of a tomography run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QptOptions {
    pub mode: MeasurementMode,
    pub seed: u64,
    pub segment_ns: f64,
    pub dt: f64,
    /// Replace χ by its nearest CP map before computing F_P. Off by default:
    /// clipping keeps F_P ≤ 1 but biases it low by O(1/√shots).
    pub clip_to_cp: bool,
}

impl Default for QptOptions {
    fn default() -> Self {
        Self {
            mode: MeasurementMode::Exact,
            seed: 0,
            segment_ns: DEFAULT_SEGMENT_NS,
            dt: DEFAULT_DT_NS,
            clip_to_cp: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QptResult {
    pub chi: ProcessMatrix,
    pub chi_ideal: ProcessMatrix,
    pub fidelity: f64,
    /// Ideal input states used in the inversion.
    pub inputs: [DensityMatrix; 4],
    pub outputs: [ReconstructedState; 4],
}

/// Noise-aware channel for a geometric gate compiled to its three-segment schedule.
pub(crate) fn gate_channel(
    spec: &GateSpec,
    device: Option<&DeviceParams>,
    segment_ns: f64,
    dt: f64,
) -> Result<PauliTransferMatrix> {
    let schedule = synthesize(spec, segment_ns)?;
    match device {
        None => Ok(PauliTransferMatrix::from_unitary(&schedule_propagator(&schedule))),
        Some(d) => {
            d.validate()?;
            PauliTransferMatrix::from_lindblad(&schedule, d.rates(), dt)
        }
    }
}

/// Full tomography of one gate.
///
/// With a device, the preparation pulses, the gate, and (in shot mode) the
/// measurement pre-rotations all run as noisy geometric schedules, and shots
/// suffer readout errors that are then corrected by confusion-matrix inversion.
/// Exact mode reads ⟨σ⟩ directly and so skips measurement pulses and readout.
pub fn run_qpt(gate: &GateSpec, device: Option<&DeviceParams>, opts: &QptOptions) -> Result<QptResult> {
    gate.validate()?;
    let channel = |spec: &GateSpec| gate_channel(spec, device, opts.segment_ns, opts.dt);
    let gate_ch = channel(gate)?;
    let readout = device.map(ReadoutModel::from_device);
    let rotations: [Option<PauliTransferMatrix>; 3] = match opts.mode {
        MeasurementMode::Exact => [None; 3],
        MeasurementMode::Shots(_) => {
            let mut r = [None; 3];
            for (k, b) in BASES.into_iter().enumerate() {
                r[k] = b.pre_rotation().map(|s| channel(&s)).transpose()?;
            }
            r
        }
    };

    let prep = preparation_gates();
    let inputs = prepare_input_states().map(|s| s.to_density());
    let mut outputs = [ReconstructedState { rho: DensityMatrix::maximally_mixed(), projected: false }; 4];
    for (i, spec) in prep.iter().enumerate() {
        let prepared = channel(spec)?.apply(&PureState::zero().to_density());
        let out = gate_ch.apply(&prepared);
        let mut rng = stream_rng(opts.seed, i as u64 + 1);
        let mut rotate = |b: Basis, r: &DensityMatrix| -> Result<DensityMatrix> {
            let k = BASES.iter().position(|&x| x == b).expect("known basis");
            Ok(rotations[k].map_or(*r, |ch| ch.apply(r)))
        };
        let r = measure_with(&out, opts.mode, readout.as_ref(), &mut rng, &mut rotate)?;
        outputs[i] = reconstruct_state(r);
    }
    let mut chi = reconstruct_chi(&inputs, &outputs.map(|o| o.rho))?;
    if opts.clip_to_cp {
        chi = chi.clipped_to_cp();
    }
    let chi_ideal = ProcessMatrix::from_unitary(&gate.unitary());
    let fidelity = process_fidelity(&chi, &chi_ideal);
    Ok(QptResult { chi, chi_ideal, fidelity, inputs, outputs })
}

const LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

/// JSON report of a tomography run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QptReport {
    pub gate: String,
    pub mode: MeasurementMode,
    pub shots: Option<u32>,
    pub seed: u64,
    pub chi_real: [[f64; 4]; 4],
    pub chi_imag: [[f64; 4]; 4],
    pub chi_ideal_real: [[f64; 4]; 4],
    pub chi_ideal_imag: [[f64; 4]; 4],
    pub fidelity: f64,
    pub clipped_to_cp: bool,
    pub min_chi_eigenvalue: f64,
}

impl QptReport {
    pub fn new(gate: &str, opts: &QptOptions, result: &QptResult) -> Self {
        Self {
            gate: gate.to_string(),
            mode: opts.mode,
            shots: match opts.mode {
                MeasurementMode::Exact => None,
                MeasurementMode::Shots(n) => Some(n),
            },
            seed: opts.seed,
            chi_real: result.chi.real_part(),
            chi_imag: result.chi.imag_part(),
            chi_ideal_real: result.chi_ideal.real_part(),
            chi_ideal_imag: result.chi_ideal.imag_part(),
            fidelity: result.fidelity,
            clipped_to_cp: opts.clip_to_cp,
            min_chi_eigenvalue: result.chi.eigenvalues()[0],
        }
    }
}

/// Bar-chart data `row,col,re,im` with labels I, X, Y, Z.
pub fn chi_csv(chi: &ProcessMatrix) -> String {
    let mut out = String::from("row,col,re,im\n");
    for (i, row) in chi.0.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", LABELS[i], LABELS[j], z.re, z.im);
        }
    }
    out
}
