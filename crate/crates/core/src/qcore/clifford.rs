//! The 24-element single-qubit Clifford group (modulo global phase).
//!
//! Elements are enumerated breadth-first from the identity by left-multiplying
//! with the generators Rx(π/2), Ry(π/2), Rx(−π/2), Ry(−π/2), in that order.
//! Index 0 is the identity. Each element is stored as the special-unitary
//! matrix rebuilt from its own axis-angle decomposition, so `unitary` and
//! `spec` agree exactly.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use super::gate::{axis_angle_unitary, phase_distance, unitary_to_axis_angle, GateSpec};
use super::matrix::Complex2x2;

pub const CLIFFORD_COUNT: usize = 24;

const MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CliffordElement {
    pub index: usize,
    pub unitary: Complex2x2,
    pub spec: GateSpec,
}

#[derive(Clone, Debug)]
pub struct CliffordGroup {
    elements: Vec<CliffordElement>,
    /// `compose[a][b]` is the index of U_a·U_b (b acts first).
    compose: [[u8; CLIFFORD_COUNT]; CLIFFORD_COUNT],
    inverse: [u8; CLIFFORD_COUNT],
}

/// Outcome of an exhaustive group-axiom check.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupCheck {
    pub size_ok: bool,
    pub identity_ok: bool,
    pub distinct_ok: bool,
    /// Number of (a, b) pairs whose table entry disagrees with the matrix product.
    pub closure_failures: usize,
    pub inverse_failures: usize,
}

impl GroupCheck {
    pub fn passed(&self) -> bool {
        self.size_ok
            && self.identity_ok
            && self.distinct_ok
            && self.closure_failures == 0
            && self.inverse_failures == 0
    }
}

fn canonical(u: &Complex2x2) -> (Complex2x2, GateSpec) {
    let spec = unitary_to_axis_angle(u).expect("Clifford products stay unitary");
    (axis_angle_unitary(&spec), spec)
}

fn same_up_to_phase(u: &Complex2x2, v: &Complex2x2) -> bool {
    phase_distance(u, v).map(|d| d < MATCH_TOL).unwrap_or(false)
}

impl CliffordGroup {
    pub fn generate() -> Self {
        let gens = [
            GateSpec { theta: FRAC_PI_2, phi: 0.0, gamma: FRAC_PI_2 },
            GateSpec { theta: FRAC_PI_2, phi: FRAC_PI_2, gamma: FRAC_PI_2 },
            GateSpec { theta: FRAC_PI_2, phi: 0.0, gamma: -FRAC_PI_2 },
            GateSpec { theta: FRAC_PI_2, phi: FRAC_PI_2, gamma: -FRAC_PI_2 },
        ]
        .map(|s| axis_angle_unitary(&s));

        let mut unitaries: Vec<(Complex2x2, GateSpec)> = vec![(Complex2x2::identity(), GateSpec::identity())];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for g in &gens {
                let candidate = *g * unitaries[k].0;
                if !unitaries.iter().any(|(u, _)| same_up_to_phase(u, &candidate)) {
                    unitaries.push(canonical(&candidate));
                    queue.push_back(unitaries.len() - 1);
                }
            }
        }
        assert_eq!(unitaries.len(), CLIFFORD_COUNT, "generator expansion must close at 24 elements");

        let elements: Vec<CliffordElement> = unitaries
            .into_iter()
            .enumerate()
            .map(|(index, (unitary, spec))| CliffordElement { index, unitary, spec })
            .collect();

        let lookup = |u: &Complex2x2| {
            elements
                .iter()
                .position(|e| same_up_to_phase(&e.unitary, u))
                .expect("group is closed") as u8
        };
        let mut compose = [[0u8; CLIFFORD_COUNT]; CLIFFORD_COUNT];
        for (a, row) in compose.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                *entry = lookup(&(elements[a].unitary * elements[b].unitary));
            }
        }
        let mut inverse = [0u8; CLIFFORD_COUNT];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = lookup(&elements[a].unitary.dagger());
        }
        Self { elements, compose, inverse }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CliffordElement] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &CliffordElement {
        &self.elements[index]
    }

    /// Index of U_a·U_b.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.compose[a][b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// Index of C_m···C_1 for a sequence applied in order C_1 first.
    pub fn net(&self, sequence: &[usize]) -> usize {
        sequence.iter().fold(0, |acc, &c| self.compose(c, acc))
    }

    /// The element that undoes the whole sequence.
    pub fn recovery(&self, sequence: &[usize]) -> &CliffordElement {
        self.element(self.inverse(self.net(sequence)))
    }

    /// Index whose unitary equals `u` up to phase, if any.
    pub fn find(&self, u: &Complex2x2) -> Option<usize> {
        self.elements.iter().position(|e| same_up_to_phase(&e.unitary, u))
    }

    /// Checks the stored tables against direct matrix products, exhaustively.
    pub fn check(&self) -> GroupCheck {
        let n = self.elements.len();
        let size_ok = n == CLIFFORD_COUNT;
        let identity_ok = self
            .elements
            .first()
            .is_some_and(|e| same_up_to_phase(&e.unitary, &Complex2x2::identity()));
        let distinct_ok = (0..n).all(|a| {
            (a + 1..n).all(|b| !same_up_to_phase(&self.elements[a].unitary, &self.elements[b].unitary))
        });
        let mut closure_failures = 0;
        for a in 0..n {
            for b in 0..n {
                let product = self.elements[a].unitary * self.elements[b].unitary;
                if !same_up_to_phase(&self.elements[self.compose(a, b)].unitary, &product) {
                    closure_failures += 1;
                }
            }
        }
        let inverse_failures = (0..n)
            .filter(|&a| {
                let p = self.elements[self.inverse(a)].unitary * self.elements[a].unitary;
                !same_up_to_phase(&p, &Complex2x2::identity())
            })
            .count();
        GroupCheck { size_ok, identity_ok, distinct_ok, closure_failures, inverse_failures }
    }

    /// Overwrites one composition-table entry. Only for fault-injection tests.
    #[doc(hidden)]
    pub fn tamper_composition(&mut self, a: usize, b: usize, value: usize) {
        self.compose[a][b] = value as u8;
    }
}

/// The shared, lazily built group.
pub fn clifford_group() -> &'static CliffordGroup {
    static GROUP: OnceLock<CliffordGroup> = OnceLock::new();
    GROUP.get_or_init(CliffordGroup::generate)
}

/// The Clifford that maps C_m···C_1 back to the identity.
pub fn recovery_gate(sequence: &[usize]) -> CliffordElement {
    *clifford_group().recovery(sequence)
}
