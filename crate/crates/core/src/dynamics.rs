//! Drop test on a vertical guide: free fall, sticking ground contact and the
//! damped leg flexion that follows.
//!
//! The single coordinate is the pelvis height `y` above the ground. The foot
//! touches down when `y` reaches the rest-pose closure height plus the pelvis
//! offset; from then on the foot stays pinned and the leg compression is the
//! drop of `y` below that touchdown height.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::leg::{LegModel, StiffnessSetting, GRAVITY};
use crate::statics::LegMechanism;

/// Event location tolerance (s).
const EVENT_TOLERANCE: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone)]
pub struct DropScenario {
    pub model: LegModel,
    pub setting: StiffnessSetting,
    /// Foot tip to ground at release (m).
    pub drop_height: f64,
    /// Payload at the pelvis (kg).
    pub added_mass: f64,
    /// s
    pub integrator_dt: f64,
    /// s
    pub sim_duration: f64,
    /// Contact-phase viscous damping (N·s/m).
    pub damping_c: f64,
}

impl DropScenario {
    pub fn new(model: LegModel, setting: StiffnessSetting) -> Self {
        DropScenario {
            damping_c: model.damping_c,
            model,
            setting,
            drop_height: 0.20,
            added_mass: 0.254,
            integrator_dt: 1e-4,
            sim_duration: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let checks = [
            ("drop_height", self.drop_height),
            ("integrator_dt", self.integrator_dt),
            ("sim_duration", self.sim_duration),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.added_mass.is_finite() && self.added_mass >= 0.0) {
            return Err(Error::Domain(format!(
                "added_mass must be >= 0, got {}",
                self.added_mass
            )));
        }
        if !(self.damping_c.is_finite() && self.damping_c >= 0.0) {
            return Err(Error::Domain(format!(
                "damping_c must be >= 0, got {}",
                self.damping_c
            )));
        }
        if self.mass() <= 0.0 {
            return Err(Error::Domain("effective mass must be > 0".into()));
        }
        Ok(())
    }

    /// Added mass plus the leg's lumped mass (kg).
    pub fn mass(&self) -> f64 {
        self.added_mass + self.model.lumped_mass
    }
}

/// Peak and settling quantities of one drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DropMetrics {
    #[serde(rename = "peak_acceleration_mps2")]
    pub peak_acceleration: f64,
    /// Largest compression below the touchdown height (m, positive).
    #[serde(rename = "max_deflection_m")]
    pub max_deflection: f64,
    /// Mean compression over the final 10% of samples (m).
    #[serde(rename = "steady_state_deflection_m")]
    pub steady_state_deflection: f64,
    /// Contact to first upward zero crossing of the velocity; `None` when the
    /// velocity never changes sign within the horizon.
    #[serde(rename = "deceleration_duration_s")]
    pub deceleration_duration: Option<f64>,
}

impl DropMetrics {
    /// Percent by which this peak acceleration is below `other`'s.
    pub fn peak_reduction_vs(&self, other: &DropMetrics) -> f64 {
        peak_reduction_percent(other.peak_acceleration, self.peak_acceleration)
    }
}

/// `100 (reference - peak) / reference`.
pub fn peak_reduction_percent(reference_peak: f64, peak: f64) -> f64 {
    100.0 * (reference_peak - peak) / reference_peak
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropTrace {
    pub time: Vec<f64>,
    pub pelvis_y: Vec<f64>,
    pub pelvis_vy: Vec<f64>,
    pub pelvis_ay: Vec<f64>,
    /// Leg compression below the touchdown height (0 in flight).
    pub compression: Vec<f64>,
    /// Kinetic + gravitational (relative to touchdown) + elastic (J).
    pub energy: Vec<f64>,
    /// Pelvis height at touchdown (m).
    pub touchdown_height: f64,
    pub contact_time: Option<f64>,
    /// Present when contact occurred.
    pub metrics: Option<DropMetrics>,
}

impl DropTrace {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }
}

#[derive(Clone, Copy)]
struct State {
    y: f64,
    v: f64,
}

struct Plant {
    mech: LegMechanism,
    mass: f64,
    damping: f64,
    y_contact: f64,
}

impl Plant {
    fn accel(&self, s: State, contact: bool) -> Result<f64> {
        if !contact {
            return Ok(-GRAVITY);
        }
        let f = self.mech.reaction_force(self.y_contact - s.y)?;
        Ok(-GRAVITY + (f - self.damping * s.v) / self.mass)
    }

    fn rk4(&self, s: State, h: f64, contact: bool) -> Result<State> {
        let k1 = (s.v, self.accel(s, contact)?);
        let s2 = State { y: s.y + 0.5 * h * k1.0, v: s.v + 0.5 * h * k1.1 };
        let k2 = (s2.v, self.accel(s2, contact)?);
        let s3 = State { y: s.y + 0.5 * h * k2.0, v: s.v + 0.5 * h * k2.1 };
        let k3 = (s3.v, self.accel(s3, contact)?);
        let s4 = State { y: s.y + h * k3.0, v: s.v + h * k3.1 };
        let k4 = (s4.v, self.accel(s4, contact)?);
        Ok(State {
            y: s.y + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            v: s.v + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        })
    }

    fn energy(&self, s: State, contact: bool) -> Result<f64> {
        let elastic = if contact {
            self.mech.elastic_energy(self.y_contact - s.y)?
        } else {
            0.0
        };
        Ok(0.5 * self.mass * s.v * s.v + self.mass * GRAVITY * (s.y - self.y_contact) + elastic)
    }

    /// Time into a flight step at which the pelvis reaches the touchdown
    /// height, by bisection on the flight sub-step.
    fn locate_contact(&self, s: State, h: f64) -> Result<f64> {
        let gap = |tau: f64| -> Result<f64> { Ok(self.rk4(s, tau, false)?.y - self.y_contact) };
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= EVENT_TOLERANCE {
                return Ok(hi);
            }
            let mid = 0.5 * (lo + hi);
            if gap(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Numeric {
            what: "contact event bisection".into(),
            residual: hi - lo,
        })
    }
}

/// Integrates the drop with fixed-step RK4. The step that crosses touchdown
/// is split at the bisected event so the output grid stays uniform.
pub fn simulate_drop(scenario: &DropScenario) -> Result<DropTrace> {
    scenario.validate()?;
    let mech = LegMechanism::new(&scenario.model, scenario.setting)?;
    let y_contact = mech.rest_pose().height + scenario.model.l_pelvis;
    let plant = Plant {
        mech,
        mass: scenario.mass(),
        damping: scenario.damping_c,
        y_contact,
    };
    let dt = scenario.integrator_dt;
    let steps = (scenario.sim_duration / dt).round() as usize;

    let mut trace = DropTrace {
        time: Vec::with_capacity(steps + 1),
        pelvis_y: Vec::with_capacity(steps + 1),
        pelvis_vy: Vec::with_capacity(steps + 1),
        pelvis_ay: Vec::with_capacity(steps + 1),
        compression: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        touchdown_height: y_contact,
        contact_time: None,
        metrics: None,
    };
    let record = |trace: &mut DropTrace, t: f64, s: State, contact: bool| -> Result<()> {
        trace.time.push(t);
        trace.pelvis_y.push(s.y);
        trace.pelvis_vy.push(s.v);
        trace.pelvis_ay.push(plant.accel(s, contact)?);
        trace
            .compression
            .push(if contact { y_contact - s.y } else { 0.0 });
        trace.energy.push(plant.energy(s, contact)?);
        Ok(())
    };

    let mut s = State {
        y: y_contact + scenario.drop_height,
        v: 0.0,
    };
    let mut contact = false;
    record(&mut trace, 0.0, s, contact)?;
    for i in 0..steps {
        let t = i as f64 * dt;
        let next = if contact {
            plant.rk4(s, dt, true)?
        } else {
            let free = plant.rk4(s, dt, false)?;
            if free.y > y_contact {
                free
            } else {
                let tau = plant.locate_contact(s, dt)?;
                let at_contact = plant.rk4(s, tau, false)?;
                contact = true;
                trace.contact_time = Some(t + tau);
                if tau < dt {
                    plant.rk4(at_contact, dt - tau, true)?
                } else {
                    at_contact
                }
            }
        };
        s = next;
        record(&mut trace, (i + 1) as f64 * dt, s, contact)?;
    }
    trace.metrics = drop_metrics(&trace).ok();
    Ok(trace)
}

/// Summary quantities of a trace that contains a contact event.
pub fn drop_metrics(trace: &DropTrace) -> Result<DropMetrics> {
    let tc = trace
        .contact_time
        .ok_or_else(|| Error::EventMissing("no ground contact within the horizon".into()))?;
    let first = trace.time.partition_point(|&t| t < tc);
    if first >= trace.len() {
        return Err(Error::EventMissing("no samples after ground contact".into()));
    }
    let peak_acceleration = trace.pelvis_ay[first..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let max_deflection = trace.compression.iter().copied().fold(0.0, f64::max);
    let tail = (trace.len() / 10).max(1);
    let steady_state_deflection =
        trace.compression[trace.len() - tail..].iter().sum::<f64>() / tail as f64;

    let mut deceleration_duration = None;
    for i in first.max(1)..trace.len() {
        let (v0, v1) = (trace.pelvis_vy[i - 1], trace.pelvis_vy[i]);
        if v0 < 0.0 && v1 >= 0.0 {
            let (t0, t1) = (trace.time[i - 1], trace.time[i]);
            let t_zero = t0 + (t1 - t0) * (-v0) / (v1 - v0);
            deceleration_duration = Some(t_zero - tc);
            break;
        }
    }
    Ok(DropMetrics {
        peak_acceleration,
        max_deflection,
        steady_state_deflection,
        deceleration_duration,
    })
}

/// CSV `t_s,y_m,vy_mps,ay_mps2`, keeping every `every`-th sample.
pub fn trace_csv(trace: &DropTrace, every: usize) -> String {
    let every = every.max(1);
    let mut out = String::from("t_s,y_m,vy_mps,ay_mps2\n");
    for i in (0..trace.len()).step_by(every) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            trace.time[i], trace.pelvis_y[i], trace.pelvis_vy[i], trace.pelvis_ay[i]
        );
    }
    out
}
