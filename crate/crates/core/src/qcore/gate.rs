//! Axis-angle gate algebra: U = exp(−iγ n·σ/2) with n = (sinθcosφ, sinθsinφ, cosθ).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::{Complex2x2, PureState};
use crate::error::{Error, Result};

/// Unitarity tolerance for inputs to decomposition and comparison.
pub const INPUT_UNITARY_TOL: f64 = 1e-8;

/// Target rotation: axis polar angle `theta`, azimuth `phi`, rotation angle `gamma` (all radians).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl GateSpec {
    /// Validates θ ∈ [0, π], φ ∈ [−π, π), γ ∈ (−2π, 2π].
    pub fn new(theta: f64, phi: f64, gamma: f64) -> Result<Self> {
        let spec = Self { theta, phi, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub const fn identity() -> Self {
        Self { theta: 0.0, phi: 0.0, gamma: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { theta, phi, gamma } = *self;
        if !(theta.is_finite() && phi.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidGateSpec("non-finite angle".into()));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidGateSpec(format!("theta {theta} outside [0, π]")));
        }
        if !(-PI..PI).contains(&phi) {
            return Err(Error::InvalidGateSpec(format!("phi {phi} outside [−π, π)")));
        }
        if !(gamma > -2.0 * PI && gamma <= 2.0 * PI) {
            return Err(Error::InvalidGateSpec(format!("gamma {gamma} outside (−2π, 2π]")));
        }
        Ok(())
    }

    /// Unit rotation axis n(θ, φ).
    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn unitary(&self) -> Complex2x2 {
        axis_angle_unitary(self)
    }

    /// The axis eigenstates (|ψ+⟩, |ψ−⟩):
    /// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩ and e^{−iφ} sin(θ/2)|0⟩ − cos(θ/2)|1⟩,
    /// which the gate maps to e^{∓iγ/2} times themselves.
    pub fn eigenstates(&self) -> (PureState, PureState) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let plus = PureState([C64::new(c, 0.0), C64::from_polar(s, self.phi)]);
        let minus = PureState([C64::from_polar(s, -self.phi), C64::new(-c, 0.0)]);
        (plus, minus)
    }
}

/// cos(γ/2) I − i sin(γ/2) n·σ
pub fn axis_angle_unitary(spec: &GateSpec) -> Complex2x2 {
    let (s, c) = (spec.gamma / 2.0).sin_cos();
    let n = spec.axis();
    Complex2x2::identity().scale_re(c) + Complex2x2::pauli_dot(n).scale(C64::new(0.0, -s))
}

fn check_unitary(u: &Complex2x2) -> Result<()> {
    let defect = u.unitarity_defect();
    if !defect.is_finite() || defect > INPUT_UNITARY_TOL {
        return Err(Error::NonUnitaryInput(defect));
    }
    Ok(())
}

/// Recovers (θ, φ, γ) from a unitary, discarding its global phase.
///
/// Returns γ ∈ [0, π] except for gates within ~1e−9 of γ = π, where the axis is
/// canonicalized (first nonzero of n_z, n_x, n_y positive) and γ may land just above π.
/// The identity maps to (0, 0, 0).
pub fn unitary_to_axis_angle(u: &Complex2x2) -> Result<GateSpec> {
    check_unitary(u)?;
    let half_phase = u.det().arg() / 2.0;
    let v = u.scale(C64::from_polar(1.0, -half_phase));
    let i = C64::new(0.0, 1.0);
    let (v00, v01, v10, v11) = (v.get(0, 0), v.get(0, 1), v.get(1, 0), v.get(1, 1));

    let mut a = ((v00 + v11) / 2.0).re;
    let mut b = [
        (i * (v01 + v10) / 2.0).re,
        ((v10 - v01) / 2.0).re,
        (i * (v00 - v11) / 2.0).re,
    ];
    let flip = |a: &mut f64, b: &mut [f64; 3]| {
        *a = -*a;
        b.iter_mut().for_each(|x| *x = -*x);
    };
    if a < 0.0 {
        flip(&mut a, &mut b);
    }
    let s = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if s < 1e-13 {
        return Ok(GateSpec::identity());
    }
    if a.abs() < 1e-9 {
        const SIGN_TOL: f64 = 1e-9;
        let lead = [b[2], b[0], b[1]].into_iter().find(|x| x.abs() > SIGN_TOL).unwrap_or(0.0);
        if lead < 0.0 {
            flip(&mut a, &mut b);
        }
    }
    let gamma = 2.0 * s.atan2(a);
    let n = [b[0] / s, b[1] / s, b[2] / s];
    let rho = n[0].hypot(n[1]);
    let theta = rho.atan2(n[2]);
    let mut phi = if rho < 1e-15 { 0.0 } else { n[1].atan2(n[0]) };
    if phi >= PI {
        phi -= 2.0 * PI;
    }
    Ok(GateSpec { theta, phi, gamma })
}

/// 1 − |Tr(U†V)|/2, zero iff U and V differ by a global phase.
pub fn phase_distance(u: &Complex2x2, v: &Complex2x2) -> Result<f64> {
    check_unitary(u)?;
    check_unitary(v)?;
    let overlap = (u.dagger() * *v).trace().norm() / 2.0;
    Ok((1.0 - overlap).clamp(0.0, 1.0))
}

/// The eight gates demonstrated in the experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedGate {
    I,
    H,
    RxPi,
    RxHalfPi,
    RyPi,
    RyHalfPi,
    RzPi,
    RzHalfPi,
}

impl NamedGate {
    pub const ALL: [NamedGate; 8] = [
        NamedGate::I,
        NamedGate::H,
        NamedGate::RxPi,
        NamedGate::RxHalfPi,
        NamedGate::RyPi,
        NamedGate::RyHalfPi,
        NamedGate::RzPi,
        NamedGate::RzHalfPi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedGate::I => "I",
            NamedGate::H => "H",
            NamedGate::RxPi => "Rx(pi)",
            NamedGate::RxHalfPi => "Rx(pi/2)",
            NamedGate::RyPi => "Ry(pi)",
            NamedGate::RyHalfPi => "Ry(pi/2)",
            NamedGate::RzPi => "Rz(pi)",
            NamedGate::RzHalfPi => "Rz(pi/2)",
        }
    }

    /// File-name-safe form, e.g. `Rx_pi_2`.
    pub fn slug(&self) -> &'static str {
        match self {
            NamedGate::I => "I",
            NamedGate::H => "H",
            NamedGate::RxPi => "Rx_pi",
            NamedGate::RxHalfPi => "Rx_pi_2",
            NamedGate::RyPi => "Ry_pi",
            NamedGate::RyHalfPi => "Ry_pi_2",
            NamedGate::RzPi => "Rz_pi",
            NamedGate::RzHalfPi => "Rz_pi_2",
        }
    }

    pub fn spec(&self) -> GateSpec {
        let (theta, phi, gamma) = match self {
            NamedGate::I => (0.0, 0.0, 0.0),
            NamedGate::H => (FRAC_PI_4, 0.0, PI),
            NamedGate::RxPi => (FRAC_PI_2, 0.0, PI),
            NamedGate::RxHalfPi => (FRAC_PI_2, 0.0, FRAC_PI_2),
            NamedGate::RyPi => (FRAC_PI_2, FRAC_PI_2, PI),
            NamedGate::RyHalfPi => (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2),
            NamedGate::RzPi => (0.0, 0.0, PI),
            NamedGate::RzHalfPi => (0.0, 0.0, FRAC_PI_2),
        };
        GateSpec { theta, phi, gamma }
    }

    /// The textbook matrix of the gate (not necessarily special-unitary).
    pub fn standard_matrix(&self) -> Complex2x2 {
        let rot = |axis: Complex2x2, angle: f64| {
            let (s, c) = (angle / 2.0).sin_cos();
            Complex2x2::identity().scale_re(c) + axis.scale(C64::new(0.0, -s))
        };
        match self {
            NamedGate::I => Complex2x2::identity(),
            NamedGate::H => Complex2x2::hadamard(),
            NamedGate::RxPi => rot(Complex2x2::sigma_x(), PI),
            NamedGate::RxHalfPi => rot(Complex2x2::sigma_x(), FRAC_PI_2),
            NamedGate::RyPi => rot(Complex2x2::sigma_y(), PI),
            NamedGate::RyHalfPi => rot(Complex2x2::sigma_y(), FRAC_PI_2),
            NamedGate::RzPi => rot(Complex2x2::sigma_z(), PI),
            NamedGate::RzHalfPi => rot(Complex2x2::sigma_z(), FRAC_PI_2),
        }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let key = key.replace('π', "pi");
        NamedGate::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(&key) || g.slug().eq_ignore_ascii_case(&key))
            .ok_or_else(|| Error::UnknownGateName(s.to_string()))
    }
}

/// Looks up one of the eight named gates by identifier, e.g. `"Rx(pi/2)"`.
pub fn named_gate(name: &str) -> Result<GateSpec> {
    name.parse::<NamedGate>().map(|g| g.spec())
}
