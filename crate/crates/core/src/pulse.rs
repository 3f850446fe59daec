//! Three-segment orange-slice pulse schedules.
//!
//! Segment k drives H(t) = Ω_k(t)(cos φ′_k σx + sin φ′_k σy) for a duration T with
//! pulse areas (θ/2, π/2, π/2 − θ/2) and phases (φ − π/2, φ − γ/2 + π/2, φ − π/2).
//! All three segments share the same duration; the peak amplitude is scaled per
//! segment to hit its area, and a zero-area segment is kept with Ω0 = 0.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::GateSpec;

/// Default segment duration in ns.
pub const DEFAULT_SEGMENT_NS: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    /// Ω0 sin²(πt/T)
    #[default]
    Sin2,
    /// Constant Ω0 over the segment.
    Square,
}

impl Envelope {
    /// ∫_0^T shape(t) dt / (Ω0 T)
    fn area_factor(self) -> f64 {
        match self {
            Envelope::Sin2 => 0.5,
            Envelope::Square => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Envelope::Sin2 => "sin2",
            Envelope::Square => "square",
        }
    }
}

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Envelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin2" => Ok(Envelope::Sin2),
            "square" => Ok(Envelope::Square),
            other => Err(Error::InvalidConfig(format!("unknown envelope `{other}`"))),
        }
    }
}

/// One constant-phase drive interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    /// ns
    pub duration: f64,
    /// Ω0 in rad/ns.
    pub peak_amplitude: f64,
    /// φ′ in rad.
    pub phase_offset: f64,
    pub envelope: Envelope,
}

impl PulseSegment {
    /// Rabi rate Ω(t) at local time `t` ∈ [0, duration].
    pub fn amplitude_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::OutOfRange { t, duration: self.duration });
        }
        Ok(self.amplitude_unchecked(t))
    }

    pub(crate) fn amplitude_unchecked(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::Sin2 => {
                if t <= 0.0 || t >= self.duration {
                    return 0.0;
                }
                let s = (PI * t / self.duration).sin();
                self.peak_amplitude * s * s
            }
            Envelope::Square => self.peak_amplitude,
        }
    }

    /// ∫Ω(t)dt in closed form.
    pub fn area(&self) -> f64 {
        self.peak_amplitude * self.duration * self.envelope.area_factor()
    }

    /// ∫Ω(t)dt by adaptive Simpson quadrature, independent of the closed form.
    pub fn area_by_quadrature(&self, tol: f64) -> f64 {
        let f = |t: f64| self.amplitude_unchecked(t);
        adaptive_simpson(&f, 0.0, self.duration, tol)
    }

    /// Unit drive direction (cos φ′, sin φ′, 0) in the Bloch xy-plane.
    pub fn drive_axis(&self) -> [f64; 3] {
        let (s, c) = self.phase_offset.sin_cos();
        [c, s, 0.0]
    }
}

/// Same as [`PulseSegment::amplitude_at`].
pub fn amplitude_at(segment: &PulseSegment, t: f64) -> Result<f64> {
    segment.amplitude_at(t)
}

/// Same as [`PulseSegment::area`].
pub fn segment_area(segment: &PulseSegment) -> f64 {
    segment.area()
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    // Force at least one split: a single Simpson panel is exact-looking on symmetric shapes.
    let m = 0.5 * (a + b);
    let half = |x: f64, y: f64, fx: f64, fy: f64| {
        let fmid = f(0.5 * (x + y));
        recurse(f, x, y, fx, fmid, fy, simpson(fx, fmid, fy, x, y), tol / 2.0, 48)
    };
    half(a, m, fa, fm) + half(m, b, fm, fb)
}

/// Three timed segments realizing one geometric gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub segments: [PulseSegment; 3],
    pub source_spec: GateSpec,
}

impl PulseSchedule {
    /// Boundary times (τ1, τ2, τ).
    pub fn boundaries(&self) -> [f64; 3] {
        let d = self.segments.map(|s| s.duration);
        [d[0], d[0] + d[1], d[0] + d[1] + d[2]]
    }

    pub fn total_duration(&self) -> f64 {
        self.boundaries()[2]
    }

    /// The nominal segment duration T (all three segments share it).
    pub fn segment_duration(&self) -> f64 {
        self.segments[0].duration
    }

    /// Segment index and local time for a schedule time in [0, τ].
    /// Boundaries belong to the later segment except at τ itself.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let total = self.total_duration();
        if !(0.0..=total).contains(&t) {
            return Err(Error::OutOfRange { t, duration: total });
        }
        let mut start = 0.0;
        for (k, seg) in self.segments.iter().enumerate() {
            if t < start + seg.duration || k == 2 {
                return Ok((k, (t - start).clamp(0.0, seg.duration)));
            }
            start += seg.duration;
        }
        unreachable!()
    }

    pub fn to_document(&self) -> ScheduleDocument {
        ScheduleDocument {
            theta: self.source_spec.theta,
            phi: self.source_spec.phi,
            gamma: self.source_spec.gamma,
            t_ns: self.segment_duration(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentDocument {
                    duration_ns: s.duration,
                    peak_rad_per_ns: s.peak_amplitude,
                    phase_rad: s.phase_offset,
                    envelope: s.envelope,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("schedule serializes")
    }
}

/// On-disk schedule format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    #[serde(rename = "T_ns")]
    pub t_ns: f64,
    pub segments: Vec<SegmentDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDocument {
    pub duration_ns: f64,
    pub peak_rad_per_ns: f64,
    pub phase_rad: f64,
    pub envelope: Envelope,
}

impl ScheduleDocument {
    pub fn into_schedule(self) -> Result<PulseSchedule> {
        let spec = GateSpec::new(self.theta, self.phi, self.gamma)?;
        let segs: Vec<PulseSegment> = self
            .segments
            .into_iter()
            .map(|s| {
                if !(s.duration_ns > 0.0) {
                    return Err(Error::InvalidDuration(s.duration_ns));
                }
                Ok(PulseSegment {
                    duration: s.duration_ns,
                    peak_amplitude: s.peak_rad_per_ns,
                    phase_offset: s.phase_rad,
                    envelope: s.envelope,
                })
            })
            .collect::<Result<_>>()?;
        let segments: [PulseSegment; 3] = segs
            .try_into()
            .map_err(|v: Vec<_>| Error::InvalidConfig(format!("expected 3 segments, got {}", v.len())))?;
        Ok(PulseSchedule { segments, source_spec: spec })
    }
}

/// Target areas (θ/2, π/2, π/2 − θ/2).
pub fn segment_areas(spec: &GateSpec) -> [f64; 3] {
    [spec.theta / 2.0, FRAC_PI_2, FRAC_PI_2 - spec.theta / 2.0]
}

/// Segment phases (φ − π/2, φ − γ/2 + π/2, φ − π/2).
pub fn segment_phases(spec: &GateSpec) -> [f64; 3] {
    let outer = spec.phi - FRAC_PI_2;
    [outer, spec.phi - spec.gamma / 2.0 + FRAC_PI_2, outer]
}

/// Builds the sin² schedule for `spec` with segment duration `segment_ns`.
pub fn synthesize(spec: &GateSpec, segment_ns: f64) -> Result<PulseSchedule> {
    synthesize_with_envelope(spec, segment_ns, Envelope::Sin2)
}

pub fn synthesize_with_envelope(spec: &GateSpec, segment_ns: f64, envelope: Envelope) -> Result<PulseSchedule> {
    if !(segment_ns > 0.0 && segment_ns.is_finite()) {
        return Err(Error::InvalidDuration(segment_ns));
    }
    spec.validate()?;
    let areas = segment_areas(spec);
    let phases = segment_phases(spec);
    let segments = std::array::from_fn(|k| PulseSegment {
        duration: segment_ns,
        peak_amplitude: areas[k] / (envelope.area_factor() * segment_ns),
        phase_offset: phases[k],
        envelope,
    });
    Ok(PulseSchedule { segments, source_spec: *spec })
}
