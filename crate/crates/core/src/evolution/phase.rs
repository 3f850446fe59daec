//! Total/dynamical/geometric phase split and Bloch-sphere solid angles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Maximum 1 − |⟨ψ(0)|ψ(τ)⟩| for a trajectory to count as cyclic.
pub const CYCLICITY_TOL: f64 = 1e-6;

/// Maximum endpoint gap for a closed Bloch path.
pub const CLOSURE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    /// arg⟨ψ(0)|ψ(τ)⟩ ∈ (−π, π]
    pub total: f64,
    /// −∫⟨ψ|H|ψ⟩dt
    pub dynamical: f64,
    /// total − dynamical, wrapped to (−π, π]
    pub geometric: f64,
    pub cyclicity_defect: f64,
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Splits the cyclic phase of a pure trajectory into dynamical and geometric parts.
///
/// The dynamical phase is integrated with the composite trapezoid rule over the samples.
pub fn phase_decomposition(traj: &Trajectory) -> Result<PhaseReport> {
    let states = traj.pure_states().ok_or(Error::NotPure)?;
    let (first, last) = match (states.first(), states.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NotCyclic(1.0)),
    };
    let overlap = first.inner(last);
    let defect = (1.0 - overlap.norm()).max(0.0);
    if defect > CYCLICITY_TOL {
        return Err(Error::NotCyclic(defect));
    }
    let energies: Vec<f64> = states
        .iter()
        .zip(traj.hamiltonians())
        .map(|(s, h)| s.expectation(h).re)
        .collect();
    let integral: f64 = traj
        .times()
        .windows(2)
        .zip(energies.windows(2))
        .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] + e[1]))
        .sum();
    let total = wrap_angle(overlap.arg());
    let dynamical = -integral;
    Ok(PhaseReport { total, dynamical, geometric: wrap_angle(total - dynamical), cyclicity_defect: defect })
}

/// Bloch vectors (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a pure trajectory.
pub fn bloch_trajectory(traj: &Trajectory) -> Result<Vec<[f64; 3]>> {
    let states = traj.pure_states().ok_or(Error::NotPure)?;
    Ok(states.iter().map(|s| s.bloch_vector()).collect())
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn gap(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Signed area of the geodesic triangle (a, b, c); positive when counterclockwise seen from outside.
pub fn spherical_triangle_area(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let num = dot(a, &cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Signed solid angle enclosed by a closed path of unit vectors.
///
/// Triangles are fanned from the first point. Vertices antipodal to that apex
/// (within 1e−6) are skipped, since the geodesic from the apex is undefined there.
pub fn enclosed_solid_angle(path: &[[f64; 3]]) -> Result<f64> {
    let (apex, last) = match (path.first(), path.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Ok(0.0),
    };
    let closure = gap(&apex, &last);
    if closure > CLOSURE_TOL {
        return Err(Error::PathNotClosed(closure));
    }
    let antipode = apex.map(|x| -x);
    let usable: Vec<&[f64; 3]> = path.iter().filter(|p| gap(p, &antipode) > 1e-6).collect();
    Ok(usable.windows(2).map(|w| spherical_triangle_area(&apex, w[0], w[1])).sum())
}
