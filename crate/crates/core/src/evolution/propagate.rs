//! Closed-form and fixed-step RK4 propagation of pulse schedules.

use num_complex::Complex64 as C64;

use super::device::{DecoherenceRates, DeviceParams};
use super::trajectory::{Trajectory, TrajectoryStates};
use crate::error::{Error, Result};
use crate::pulse::{PulseSchedule, PulseSegment};
use crate::qcore::{Complex2x2, DensityMatrix, PureState};

/// Default integrator step in ns.
pub const DEFAULT_DT_NS: f64 = 0.01;

const MINUS_I: C64 = C64::new(0.0, -1.0);

/// H = Ω(t)(cos φ′ σx + sin φ′ σy) at local time `t` within the segment.
pub fn segment_hamiltonian(segment: &PulseSegment, t: f64) -> Complex2x2 {
    let omega = segment.amplitude_unchecked(t);
    Complex2x2::pauli_dot(segment.drive_axis()).scale_re(omega)
}

/// Hamiltonian of the schedule at time `t` ∈ [0, τ].
pub fn hamiltonian_at(schedule: &PulseSchedule, t: f64) -> Result<Complex2x2> {
    let (k, local) = schedule.locate(t)?;
    Ok(segment_hamiltonian(&schedule.segments[k], local))
}

/// exp(−i a (cos φ′ σx + sin φ′ σy)) with a the segment area.
///
/// The drive direction is constant within a segment, so H(t) commutes with
/// itself and only the area matters, not the envelope shape.
pub fn segment_propagator_exact(segment: &PulseSegment) -> Complex2x2 {
    let (s, c) = segment.area().sin_cos();
    Complex2x2::identity().scale_re(c) + Complex2x2::pauli_dot(segment.drive_axis()).scale(MINUS_I * s)
}

/// U3·U2·U1.
pub fn schedule_propagator(schedule: &PulseSchedule) -> Complex2x2 {
    schedule
        .segments
        .iter()
        .fold(Complex2x2::identity(), |acc, seg| segment_propagator_exact(seg) * acc)
}

pub(crate) trait Rk4State: Copy {
    fn add_scaled(&self, other: &Self, h: f64) -> Self;
}

impl Rk4State for Complex2x2 {
    fn add_scaled(&self, other: &Self, h: f64) -> Self {
        *self + other.scale_re(h)
    }
}

impl Rk4State for PureState {
    fn add_scaled(&self, other: &Self, h: f64) -> Self {
        PureState([self.0[0] + other.0[0] * h, self.0[1] + other.0[1] * h])
    }
}

fn rk4_step<S: Rk4State>(y: &S, t: f64, h: f64, f: &impl Fn(f64, &S) -> S) -> S {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.add_scaled(&k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &y.add_scaled(&k2, 0.5 * h));
    let k4 = f(t + h, &y.add_scaled(&k3, h));
    let incr = k1.add_scaled(&k2, 2.0).add_scaled(&k3, 2.0).add_scaled(&k4, 1.0);
    y.add_scaled(&incr, h / 6.0)
}

fn check_step(schedule: &PulseSchedule, dt: f64) -> Result<()> {
    let shortest = schedule.segments.iter().map(|s| s.duration).fold(f64::INFINITY, f64::min);
    let limit = shortest / 100.0;
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    Ok(())
}

/// Integrates `f` across each segment with steps that land exactly on the
/// segment boundaries, calling `visit(t, segment, local_t, y)` at every grid point.
/// The boundary point between two segments is visited once, attributed to the later one.
fn integrate<S: Rk4State>(
    schedule: &PulseSchedule,
    dt: f64,
    y0: S,
    f: impl Fn(&PulseSegment, f64, &S) -> S,
    mut visit: impl FnMut(f64, &PulseSegment, f64, &S),
) -> S {
    let mut y = y0;
    let mut start = 0.0;
    visit(0.0, &schedule.segments[0], 0.0, &y);
    for (k, seg) in schedule.segments.iter().enumerate() {
        let steps = (seg.duration / dt - 1e-9).ceil().max(1.0) as usize;
        let h = seg.duration / steps as f64;
        let rhs = |t: f64, s: &S| f(seg, t, s);
        for j in 0..steps {
            y = rk4_step(&y, j as f64 * h, h, &rhs);
            let local = (j + 1) as f64 * h;
            let is_boundary = j + 1 == steps;
            if is_boundary && k + 1 < schedule.segments.len() {
                visit(start + seg.duration, &schedule.segments[k + 1], 0.0, &y);
            } else {
                visit(start + local, seg, local, &y);
            }
        }
        start += seg.duration;
    }
    y
}

/// Solves i|ψ̇⟩ = H(t)|ψ⟩ with fixed-step RK4, sampling at every step.
pub fn evolve_unitary(schedule: &PulseSchedule, psi0: &PureState, dt: f64) -> Result<Trajectory> {
    check_step(schedule, dt)?;
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut hams = Vec::new();
    integrate(
        schedule,
        dt,
        *psi0,
        |seg, t, psi: &PureState| {
            let v = segment_hamiltonian(seg, t).apply(psi.0);
            PureState([v[0] * MINUS_I, v[1] * MINUS_I])
        },
        |t, seg, local, psi| {
            times.push(t);
            states.push(*psi);
            hams.push(segment_hamiltonian(seg, local));
        },
    );
    Ok(Trajectory::new(times, TrajectoryStates::Pure(states), hams))
}

/// The full propagator from RK4 integration of U̇ = −iH(t)U.
pub fn evolve_propagator(schedule: &PulseSchedule, dt: f64) -> Result<Complex2x2> {
    check_step(schedule, dt)?;
    Ok(integrate(
        schedule,
        dt,
        Complex2x2::identity(),
        |seg, t, u: &Complex2x2| (segment_hamiltonian(seg, t) * *u).scale(MINUS_I),
        |_, _, _, _| {},
    ))
}

/// dρ/dt = −i[H, ρ] + Γ1 D[σ−]ρ + (Γφ/2) D[σz]ρ, D[L]ρ = LρL† − ½{L†L, ρ}.
pub(crate) fn lindblad_rhs(h: &Complex2x2, rho: &Complex2x2, rates: DecoherenceRates) -> Complex2x2 {
    let mut d = h.commutator(rho).scale(MINUS_I);
    let m = &rho.0;
    if rates.relaxation != 0.0 {
        // σ−ρσ+ = ρ11|0⟩⟨0|; ½{|1⟩⟨1|, ρ} halves the off-diagonals and keeps ρ11.
        let g = rates.relaxation;
        d = d + Complex2x2::new(m[1][1] * g, m[0][1] * (-0.5 * g), m[1][0] * (-0.5 * g), -m[1][1] * g);
    }
    if rates.dephasing != 0.0 {
        // (Γφ/2)(σzρσz − ρ) = −Γφ × off-diagonals
        let g = rates.dephasing;
        d = d + Complex2x2::new(C64::new(0.0, 0.0), m[0][1] * -g, m[1][0] * -g, C64::new(0.0, 0.0));
    }
    d
}

fn lindblad_sampled(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    rates: DecoherenceRates,
    dt: f64,
    mut visit: impl FnMut(f64, &PulseSegment, f64, &Complex2x2),
) -> Result<DensityMatrix> {
    check_step(schedule, dt)?;
    let rho = integrate(
        schedule,
        dt,
        *rho0.matrix(),
        |seg, t, r: &Complex2x2| lindblad_rhs(&segment_hamiltonian(seg, t), r, rates),
        |t, seg, local, r| visit(t, seg, local, r),
    );
    Ok(DensityMatrix(rho))
}

/// Lindblad evolution with explicit rates, sampling at every step.
pub fn evolve_lindblad_with_rates(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    rates: DecoherenceRates,
    dt: f64,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut hams = Vec::new();
    lindblad_sampled(schedule, rho0, rates, dt, |t, seg, local, r| {
        times.push(t);
        states.push(DensityMatrix(*r));
        hams.push(segment_hamiltonian(seg, local));
    })?;
    Ok(Trajectory::new(times, TrajectoryStates::Mixed(states), hams))
}

/// Lindblad evolution under the device's T1 and T2*.
pub fn evolve_lindblad(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    device: &DeviceParams,
    dt: f64,
) -> Result<Trajectory> {
    device.validate()?;
    evolve_lindblad_with_rates(schedule, rho0, device.rates(), dt)
}

/// Final state only; avoids storing the trajectory.
pub fn lindblad_final_state(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    rates: DecoherenceRates,
    dt: f64,
) -> Result<DensityMatrix> {
    lindblad_sampled(schedule, rho0, rates, dt, |_, _, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{synthesize, synthesize_with_envelope, Envelope};
    use crate::qcore::{axis_angle_unitary, named_gate, phase_distance, GateSpec};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn seg(area: f64, phase: f64) -> PulseSegment {
        PulseSegment { duration: 10.0, peak_amplitude: area / 5.0, phase_offset: phase, envelope: Envelope::Sin2 }
    }

    fn idle(duration: f64) -> PulseSchedule {
        let s = PulseSegment { duration, peak_amplitude: 0.0, phase_offset: 0.0, envelope: Envelope::Sin2 };
        PulseSchedule { segments: [s; 3], source_spec: GateSpec::identity() }
    }

    fn state_error(a: &PureState, b: &PureState) -> f64 {
        ((a.0[0] - b.0[0]).norm_sqr() + (a.0[1] - b.0[1]).norm_sqr()).sqrt()
    }

    #[test]
    fn segment_propagator_examples() {
        let u = segment_propagator_exact(&seg(FRAC_PI_2, 0.0));
        assert!((u - Complex2x2::sigma_x().scale(MINUS_I)).norm() < 1e-15);
        assert!((segment_propagator_exact(&seg(0.0, 1.3)) - Complex2x2::identity()).norm() < 1e-15);
        let u = segment_propagator_exact(&seg(FRAC_PI_4, FRAC_PI_2));
        let expected = Complex2x2::identity().scale_re(FRAC_PI_4.cos())
            + Complex2x2::sigma_y().scale(MINUS_I * FRAC_PI_4.sin());
        assert!((u - expected).norm() < 1e-15);
    }

    #[test]
    fn propagator_independent_of_envelope() {
        let spec = named_gate("Ry(pi/2)").unwrap();
        let a = schedule_propagator(&synthesize(&spec, 10.0).unwrap());
        let b = schedule_propagator(&synthesize_with_envelope(&spec, 10.0, Envelope::Square).unwrap());
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn rz_pi_by_hand() {
        // U3U2U1 = (iσy)(−iσx) = σyσx = −iσz
        let spec = GateSpec::new(0.0, 0.0, PI).unwrap();
        let u = schedule_propagator(&synthesize(&spec, 10.0).unwrap());
        assert!((u - Complex2x2::sigma_z().scale(MINUS_I)).norm() < 1e-14);
    }

    #[test]
    fn identity_and_hadamard_schedules() {
        let u = schedule_propagator(&synthesize(&GateSpec::identity(), 10.0).unwrap());
        assert!(phase_distance(&u, &Complex2x2::identity()).unwrap() < 1e-14);
        let u = schedule_propagator(&synthesize(&named_gate("H").unwrap(), 10.0).unwrap());
        let expected = (Complex2x2::sigma_x() + Complex2x2::sigma_z()).scale(MINUS_I * std::f64::consts::FRAC_1_SQRT_2);
        assert!((u - expected).norm() < 1e-14, "{u:?}");
    }

    #[test]
    fn cyclic_eigenstate() {
        let spec = GateSpec::new(1.1, -0.4, 2.3).unwrap();
        let sched = synthesize(&spec, 10.0).unwrap();
        let psi = PureState::from_bloch_angles(spec.theta, spec.phi);
        let traj = evolve_unitary(&sched, &psi, DEFAULT_DT_NS).unwrap();
        let end = *traj.pure_states().unwrap().last().unwrap();
        let expected = PureState([psi.0[0] * C64::from_polar(1.0, -spec.gamma / 2.0), psi.0[1] * C64::from_polar(1.0, -spec.gamma / 2.0)]);
        assert!(state_error(&end, &expected) < 1e-8);
        assert!((traj.times().last().unwrap() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_is_constant() {
        let psi = PureState::from_bloch_angles(0.3, 0.2);
        let traj = evolve_unitary(&idle(10.0), &psi, 0.05).unwrap();
        assert!(traj.pure_states().unwrap().iter().all(|s| *s == psi));
    }

    #[test]
    fn step_limit() {
        let sched = synthesize(&GateSpec::identity(), 10.0).unwrap();
        assert!(matches!(evolve_unitary(&sched, &PureState::zero(), 0.2), Err(Error::StepTooLarge { .. })));
        assert!(matches!(evolve_unitary(&sched, &PureState::zero(), 0.0), Err(Error::StepTooLarge { .. })));
        assert!(evolve_unitary(&sched, &PureState::zero(), 0.1).is_ok());
    }

    #[test]
    fn fourth_order_convergence() {
        // Richardson check against the closed form: halving dt cuts the error ~16×.
        let spec = GateSpec::new(2.0, 0.7, -1.9).unwrap();
        let sched = synthesize(&spec, 10.0).unwrap();
        let exact = PureState::zero().evolve(&schedule_propagator(&sched));
        let err = |dt: f64| {
            let t = evolve_unitary(&sched, &PureState::zero(), dt).unwrap();
            state_error(t.pure_states().unwrap().last().unwrap(), &exact)
        };
        let (e1, e2) = (err(0.1), err(0.05));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio} ({e1:e}, {e2:e})");
    }

    #[test]
    fn noiseless_lindblad_matches_unitary() {
        let spec = GateSpec::new(0.9, 2.0, 1.2).unwrap();
        let sched = synthesize(&spec, 10.0).unwrap();
        let psi = PureState::from_bloch_angles(0.4, -2.5);
        let pure = evolve_unitary(&sched, &psi, DEFAULT_DT_NS).unwrap();
        let mixed = evolve_lindblad_with_rates(&sched, &psi.to_density(), DecoherenceRates::NONE, DEFAULT_DT_NS).unwrap();
        let a = pure.pure_states().unwrap();
        let b = mixed.mixed_states().unwrap();
        assert_eq!(a.len(), b.len());
        for (p, r) in a.iter().zip(b) {
            assert!((p.to_density().0 - r.0).norm() < 1e-8);
        }
    }

    #[test]
    fn t1_decay() {
        let device = DeviceParams::default();
        let sched = idle(1000.0);
        let traj = evolve_lindblad(&sched, &PureState::one().to_density(), &device, 1.0).unwrap();
        for (t, rho) in traj.times().iter().zip(traj.mixed_states().unwrap()).step_by(250) {
            let expected = (-t / (device.t1_us * 1e3)).exp();
            assert!((rho.0.get(1, 1).re - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn coherence_decay() {
        // |ρ01(t)| = e^{−(Γ1/2 + Γφ)t}/2
        let device = DeviceParams::default();
        let plus = DensityMatrix::from_bloch([1.0, 0.0, 0.0]);
        let traj = evolve_lindblad(&idle(1000.0), &plus, &device, 1.0).unwrap();
        let rate = device.relaxation_rate() / 2.0 + device.dephasing_rate();
        for (t, rho) in traj.times().iter().zip(traj.mixed_states().unwrap()) {
            let expected = (-rate * t).exp() / 2.0;
            assert!((rho.0.get(0, 1).norm() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_and_positivity_under_drive() {
        let device = DeviceParams { t1_us: 0.5, t2_star_us: 0.3, ..Default::default() };
        let sched = synthesize(&named_gate("H").unwrap(), 10.0).unwrap();
        let traj = evolve_lindblad(&sched, &PureState::zero().to_density(), &device, DEFAULT_DT_NS).unwrap();
        for rho in traj.mixed_states().unwrap() {
            assert!((rho.trace() - 1.0).abs() < 1e-9);
            assert!(rho.eigenvalues()[0] > -1e-9);
        }
    }

    #[test]
    fn idle_purity_decreases() {
        let purities = |device: &DeviceParams, rho0: &DensityMatrix, duration: f64| -> Vec<f64> {
            let traj = evolve_lindblad(&idle(duration), rho0, device, 0.5).unwrap();
            traj.mixed_states().unwrap().iter().map(|r| r.purity()).collect()
        };
        let monotone = |p: &[f64]| p.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        // Unital (dephasing-only) noise never raises purity.
        let dephasing = DeviceParams { t1_us: 1e12, t2_star_us: 0.1, ..Default::default() };
        assert!(monotone(&purities(&dephasing, &DensityMatrix::from_bloch([0.6, -0.3, 0.7]), 300.0)));
        // With relaxation, purity of an initially pure state falls until t ≈ T1 ln 2.
        let device = DeviceParams::default();
        for r in [[0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 0.6, -0.8]] {
            assert!(monotone(&purities(&device, &DensityMatrix::from_bloch(r), 1000.0)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn rk4_matches_exact(theta in 0.0..=PI, phi in -PI..PI, gamma in -2.0 * PI + 1e-9..=2.0 * PI) {
            let spec = GateSpec::new(theta, phi, gamma).unwrap();
            let sched = synthesize(&spec, 10.0).unwrap();
            let exact = schedule_propagator(&sched);
            prop_assert!(phase_distance(&exact, &axis_angle_unitary(&spec)).unwrap() < 1e-10);
            let numeric = evolve_propagator(&sched, DEFAULT_DT_NS).unwrap();
            prop_assert!((numeric - exact).norm() < 1e-8);
        }
    }
}
