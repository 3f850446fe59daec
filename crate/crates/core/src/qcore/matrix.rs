//! Dense 2×2 complex arithmetic over the computational basis {|0⟩, |1⟩}.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on ‖U†U − I‖ for the `is_unitary` predicate.
pub const UNITARY_TOL: f64 = 1e-12;

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex2x2(pub [[C64; 2]; 2]);

impl Complex2x2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Self::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0))
    }

    /// The Pauli basis (I, σx, σy, σz) in that order.
    pub const fn pauli_basis() -> [Self; 4] {
        [Self::identity(), Self::sigma_x(), Self::sigma_y(), Self::sigma_z()]
    }

    /// `n·σ` for a real 3-vector `n`.
    pub fn pauli_dot(n: [f64; 3]) -> Self {
        Self::new(
            C64::new(n[2], 0.0),
            C64::new(n[0], -n[1]),
            C64::new(n[0], n[1]),
            C64::new(-n[2], 0.0),
        )
    }

    /// The Hadamard matrix (σx + σz)/√2.
    pub fn hadamard() -> Self {
        (Self::sigma_x() + Self::sigma_z()).scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// ‖U†U − I‖ in the Frobenius norm.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self - Self::identity()).norm()
    }

    pub fn is_unitary(&self) -> bool {
        self.is_finite() && self.unitarity_defect() < UNITARY_TOL
    }

    pub fn is_hermitian(&self) -> bool {
        (*self - self.dagger()).norm() < UNITARY_TOL
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().norm() < UNITARY_TOL
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Commutator [A, B] = AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Real Pauli coefficients (c0, cx, cy, cz) with A = ½(c0 I + cx σx + cy σy + cz σz),
    /// i.e. c_k = Tr(σ_k A). Only meaningful for hermitian A.
    pub fn pauli_components(&self) -> [f64; 4] {
        let m = &self.0;
        [
            (m[0][0] + m[1][1]).re,
            (m[0][1] + m[1][0]).re,
            (I * (m[0][1] - m[1][0])).re,
            (m[0][0] - m[1][1]).re,
        ]
    }

    /// Inverse of `pauli_components`.
    pub fn from_pauli_components(c: [f64; 4]) -> Self {
        Self::new(
            C64::new((c[0] + c[3]) / 2.0, 0.0),
            C64::new(c[1] / 2.0, -c[2] / 2.0),
            C64::new(c[1] / 2.0, c[2] / 2.0),
            C64::new((c[0] - c[3]) / 2.0, 0.0),
        )
    }
}

impl fmt::Debug for Complex2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl Mul for Complex2x2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Complex2x2 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Complex2x2 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Complex2x2 {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

/// A normalized single-qubit state vector c0|0⟩ + c1|1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState(pub [C64; 2]);

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    /// Normalizes the amplitudes. Fails on a zero or non-finite vector.
    pub fn new(c0: C64, c1: C64) -> Result<Self> {
        let n = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidState("amplitudes cannot be normalized".into()));
        }
        Ok(Self([c0 / n, c1 / n]))
    }

    pub const fn zero() -> Self {
        Self([ONE, ZERO])
    }

    pub const fn one() -> Self {
        Self([ZERO, ONE])
    }

    /// The state with Bloch vector (sinθcosφ, sinθsinφ, cosθ), i.e. cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
    pub fn from_bloch_angles(theta: f64, phi: f64) -> Self {
        Self([
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
    }

    pub fn c0(&self) -> C64 {
        self.0[0]
    }

    pub fn c1(&self) -> C64 {
        self.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// ⟨ψ|A|ψ⟩
    pub fn expectation(&self, op: &Complex2x2) -> C64 {
        let v = op.apply(self.0);
        self.0[0].conj() * v[0] + self.0[1].conj() * v[1]
    }

    /// U|ψ⟩ without renormalization.
    pub fn evolve(&self, u: &Complex2x2) -> Self {
        Self(u.apply(self.0))
    }

    /// (⟨σx⟩, ⟨σy⟩, ⟨σz⟩)
    pub fn bloch_vector(&self) -> [f64; 3] {
        let a = self.0[0];
        let b = self.0[1];
        let ab = a.conj() * b;
        [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
    }

    pub fn to_density(&self) -> DensityMatrix {
        let a = self.0[0];
        let b = self.0[1];
        DensityMatrix(Complex2x2::new(
            a * a.conj(),
            a * b.conj(),
            b * a.conj(),
            b * b.conj(),
        ))
    }
}

/// A single-qubit density operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix(pub Complex2x2);

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGEN_TOL: f64 = 1e-10;

    /// Validates hermiticity, unit trace and positivity.
    pub fn new(m: Complex2x2) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    /// ρ = (I + r·σ)/2. No validation; |r| ≤ 1 gives a physical state.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        Self(Complex2x2::from_pauli_components([1.0, r[0], r[1], r[2]]))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch([0.0, 0.0, 0.0])
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite density matrix".into()));
        }
        if (m.get(0, 1) - m.get(1, 0).conj()).norm() > 1e-10
            || m.get(0, 0).im.abs() > 1e-10
            || m.get(1, 1).im.abs() > 1e-10
        {
            return Err(Error::InvalidState("density matrix is not hermitian".into()));
        }
        if (m.trace() - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {} differs from 1", m.trace())));
        }
        let lo = self.eigenvalues()[0];
        if lo < -Self::EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &Complex2x2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order (hermitian part only).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let c = self.0.pauli_components();
        let mean = c[0] / 2.0;
        let r = (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt() / 2.0;
        [mean - r, mean + r]
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Tr(ρA)
    pub fn expectation(&self, op: &Complex2x2) -> C64 {
        (self.0 * *op).trace()
    }

    /// (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) = (Tr ρσx, Tr ρσy, Tr ρσz)
    pub fn bloch_vector(&self) -> [f64; 3] {
        let c = self.0.pauli_components();
        [c[1], c[2], c[3]]
    }

    /// Population of |0⟩.
    pub fn ground_population(&self) -> f64 {
        self.0.get(0, 0).re
    }

    /// UρU†
    pub fn conjugate_by(&self, u: &Complex2x2) -> Self {
        Self(*u * self.0 * u.dagger())
    }
}
