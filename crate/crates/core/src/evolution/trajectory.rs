use std::fmt::Write as _;

use crate::qcore::{Complex2x2, DensityMatrix, PureState};

#[derive(Clone, Debug, PartialEq)]
pub enum TrajectoryStates {
    Pure(Vec<PureState>),
    Mixed(Vec<DensityMatrix>),
}

impl TrajectoryStates {
    pub fn len(&self) -> usize {
        match self {
            TrajectoryStates::Pure(v) => v.len(),
            TrajectoryStates::Mixed(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Time-sampled states together with the Hamiltonian active at each sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: TrajectoryStates,
    hamiltonians: Vec<Complex2x2>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: TrajectoryStates, hamiltonians: Vec<Complex2x2>) -> Self {
        assert_eq!(times.len(), states.len());
        assert_eq!(times.len(), hamiltonians.len());
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]), "sample times must increase");
        Self { times, states, hamiltonians }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &TrajectoryStates {
        &self.states
    }

    pub fn hamiltonians(&self) -> &[Complex2x2] {
        &self.hamiltonians
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn pure_states(&self) -> Option<&[PureState]> {
        match &self.states {
            TrajectoryStates::Pure(v) => Some(v),
            TrajectoryStates::Mixed(_) => None,
        }
    }

    pub fn mixed_states(&self) -> Option<&[DensityMatrix]> {
        match &self.states {
            TrajectoryStates::Mixed(v) => Some(v),
            TrajectoryStates::Pure(_) => None,
        }
    }

    pub fn final_density(&self) -> Option<DensityMatrix> {
        match &self.states {
            TrajectoryStates::Pure(v) => v.last().map(|s| s.to_density()),
            TrajectoryStates::Mixed(v) => v.last().copied(),
        }
    }

    /// CSV with `t_ns,re_c0,im_c0,re_c1,im_c1` for pure trajectories or
    /// `t_ns,rho00,rho11,re_rho01,im_rho01` for density matrices.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.states {
            TrajectoryStates::Pure(states) => {
                out.push_str("t_ns,re_c0,im_c0,re_c1,im_c1\n");
                for (t, s) in self.times.iter().zip(states) {
                    let _ = writeln!(out, "{t},{},{},{},{}", s.0[0].re, s.0[0].im, s.0[1].re, s.0[1].im);
                }
            }
            TrajectoryStates::Mixed(states) => {
                out.push_str("t_ns,rho00,rho11,re_rho01,im_rho01\n");
                for (t, r) in self.times.iter().zip(states) {
                    let m = r.matrix();
                    let _ = writeln!(out, "{t},{},{},{},{}", m.get(0, 0).re, m.get(1, 1).re, m.get(0, 1).re, m.get(0, 1).im);
                }
            }
        }
        out
    }
}

/// CSV with `t_ns,x,y,z`.
pub fn bloch_csv(times: &[f64], path: &[[f64; 3]]) -> String {
    let mut out = String::from("t_ns,x,y,z\n");
    for (t, r) in times.iter().zip(path) {
        let _ = writeln!(out, "{t},{},{},{}", r[0], r[1], r[2]);
    }
    out
}
