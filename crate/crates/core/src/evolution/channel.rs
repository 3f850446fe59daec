//! Single-qubit channels as real 4×4 Pauli transfer matrices.
//!
//! A state with Pauli components v = (Tr ρ, ⟨σx⟩, ⟨σy⟩, ⟨σz⟩) maps to R·v, so
//! channel composition is matrix multiplication.

use std::ops::Mul;

use super::device::DecoherenceRates;
use super::propagate::lindblad_final_state;
use crate::error::Result;
use crate::pulse::PulseSchedule;
use crate::qcore::{Complex2x2, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTransferMatrix(pub [[f64; 4]; 4]);

impl PauliTransferMatrix {
    pub const fn identity() -> Self {
        Self([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
    }

    /// ρ ↦ UρU†
    pub fn from_unitary(u: &Complex2x2) -> Self {
        let basis = Complex2x2::pauli_basis();
        let mut r = [[0.0; 4]; 4];
        for (j, pj) in basis.iter().enumerate() {
            let image = *u * *pj * u.dagger();
            let c = image.pauli_components();
            for i in 0..4 {
                r[i][j] = c[i] / 2.0;
            }
        }
        Self(r)
    }

    /// ρ ↦ (1 − λ)ρ + λ I/2
    pub fn depolarizing(strength: f64) -> Self {
        let s = 1.0 - strength;
        Self([[1.0, 0.0, 0.0, 0.0], [0.0, s, 0.0, 0.0], [0.0, 0.0, s, 0.0], [0.0, 0.0, 0.0, s]])
    }

    /// Builds the channel from its action on |0⟩, |1⟩, |+⟩ and |+i⟩, using linearity.
    pub fn from_action(mut act: impl FnMut(&DensityMatrix) -> Result<DensityMatrix>) -> Result<Self> {
        let mut comps = |r: [f64; 3]| -> Result<[f64; 4]> {
            Ok(act(&DensityMatrix::from_bloch(r))?.matrix().pauli_components())
        };
        let up = comps([0.0, 0.0, 1.0])?;
        let down = comps([0.0, 0.0, -1.0])?;
        let plus = comps([1.0, 0.0, 0.0])?;
        let plus_i = comps([0.0, 1.0, 0.0])?;
        // ε(I) = ε(ρ0) + ε(ρ1), ε(σz) = ε(ρ0) − ε(ρ1), ε(σx) = 2ε(ρ+) − ε(I), ε(σy) = 2ε(ρ+i) − ε(I)
        let mut r = [[0.0; 4]; 4];
        for i in 0..4 {
            let e_id = up[i] + down[i];
            r[i][0] = e_id / 2.0;
            r[i][1] = (2.0 * plus[i] - e_id) / 2.0;
            r[i][2] = (2.0 * plus_i[i] - e_id) / 2.0;
            r[i][3] = (up[i] - down[i]) / 2.0;
        }
        Ok(Self(r))
    }

    /// The channel of a schedule under Lindblad dynamics, from RK4 integration.
    pub fn from_lindblad(schedule: &PulseSchedule, rates: DecoherenceRates, dt: f64) -> Result<Self> {
        Self::from_action(|rho| lindblad_final_state(schedule, rho, rates, dt))
    }

    pub fn apply_components(&self, v: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| (0..4).map(|j| self.0[i][j] * v[j]).sum())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let v = self.apply_components(&rho.matrix().pauli_components());
        DensityMatrix(Complex2x2::from_pauli_components(v))
    }

    /// Sum of squared entry differences.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += (self.0[i][j] - other.0[i][j]).powi(2);
            }
        }
        s.sqrt()
    }

    /// Depolarizing parameter of the twirled channel, (Tr R − 1)/3. Meaningful for error channels.
    pub fn twirled_depolarizing(&self) -> f64 {
        (self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3] - 1.0) / 3.0
    }
}

impl Mul for PauliTransferMatrix {
    type Output = Self;

    /// `a * b` applies `b` first.
    fn mul(self, rhs: Self) -> Self {
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Self(r)
    }
}
