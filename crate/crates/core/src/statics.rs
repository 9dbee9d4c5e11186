//! Quasi-static vertical compression of the leg.
//!
//! The foot is pinned at the origin and the hip slides on the vertical line
//! through it, so the foot-knee-hip triangle closes with a single degree of
//! freedom: the hip height. The pelvis keeps its orientation, which makes the
//! femur inclination the hip angle. The crosshead force follows from virtual
//! work, `F = Σ τ_j ∂θ_j/∂y`, with `y` the vertical compression.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::leg::{Joint, LegModel, StiffnessSetting};
use crate::rotary::AntagonisticJoint;

/// Foot-to-hip distance for a given interior knee angle (law of cosines).
pub fn leg_height(model: &LegModel, knee_interior_angle: f64) -> f64 {
    let (a, b) = (model.l_femur, model.l_tibia);
    (a * a + b * b - 2.0 * a * b * knee_interior_angle.cos()).sqrt()
}

/// Joint angles and their sensitivities at one hip height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// Foot-to-hip distance (m).
    pub height: f64,
    /// Femur inclination from vertical (rad).
    pub hip_flexion: f64,
    /// Knee bend, π minus the interior angle (rad).
    pub knee_flexion: f64,
    /// ∂(hip flexion)/∂(compression) (rad/m).
    pub dhip_dy: f64,
    /// ∂(knee flexion)/∂(compression) (rad/m).
    pub dknee_dy: f64,
}

/// The leg closed-chain at a fixed stiffness setting; precomputes the rest
/// pose and both antagonistic joints.
#[derive(Debug, Clone)]
pub struct LegMechanism {
    model: LegModel,
    rest: Pose,
    hip: AntagonisticJoint,
    knee: AntagonisticJoint,
}

impl LegMechanism {
    pub fn new(model: &LegModel, setting: StiffnessSetting) -> Result<Self> {
        model.validate()?;
        let interior = std::f64::consts::PI - model.rest_knee_flexion();
        let rest = pose_at_height(model, leg_height(model, interior))?;
        Ok(LegMechanism {
            hip: model.antagonistic_joint(setting, Joint::Hip)?,
            knee: model.antagonistic_joint(setting, Joint::Knee)?,
            model: model.clone(),
            rest,
        })
    }

    pub fn model(&self) -> &LegModel {
        &self.model
    }

    pub fn rest_pose(&self) -> Pose {
        self.rest
    }

    /// Pose after lowering the hip by `compression` (negative extends).
    pub fn pose(&self, compression: f64) -> Result<Pose> {
        pose_at_height(&self.model, self.rest.height - compression)
    }

    /// Hip and knee deflections from rest.
    pub fn deflections(&self, compression: f64) -> Result<(f64, f64)> {
        let p = self.pose(compression)?;
        Ok((
            p.hip_flexion - self.rest.hip_flexion,
            p.knee_flexion - self.rest.knee_flexion,
        ))
    }

    /// Vertical force the leg exerts on the crosshead (N).
    pub fn reaction_force(&self, compression: f64) -> Result<f64> {
        let p = self.pose(compression)?;
        let hip = self.hip.torque(p.hip_flexion - self.rest.hip_flexion)?;
        let knee = self.knee.torque(p.knee_flexion - self.rest.knee_flexion)?;
        Ok(hip * p.dhip_dy + knee * p.dknee_dy)
    }

    /// Elastic energy stored in both joints' networks beyond the pretensioned
    /// rest state (J).
    pub fn elastic_energy(&self, compression: f64) -> Result<f64> {
        let (dh, dk) = self.deflections(compression)?;
        Ok(self.hip.energy(dh)? + self.knee.energy(dk)?)
    }
}

fn pose_at_height(model: &LegModel, height: f64) -> Result<Pose> {
    let (a, b) = (model.l_femur, model.l_tibia);
    let lower = (a - b).abs();
    let upper = a + b;
    if !(height.is_finite() && height > lower && height < upper) {
        return Err(Error::Geometry(format!(
            "hip height {height} m is outside the reachable range ({lower}, {upper}) m"
        )));
    }
    let cos_interior = ((a * a + b * b - height * height) / (2.0 * a * b)).clamp(-1.0, 1.0);
    let interior = cos_interior.acos();
    let cos_hip = ((a * a + height * height - b * b) / (2.0 * a * height)).clamp(-1.0, 1.0);
    let hip = cos_hip.acos();
    let (sin_interior, sin_hip) = (interior.sin(), hip.sin());
    if sin_interior <= 0.0 || sin_hip <= 0.0 {
        return Err(Error::Geometry(format!(
            "pose at hip height {height} m is singular"
        )));
    }
    Ok(Pose {
        height,
        hip_flexion: hip,
        knee_flexion: std::f64::consts::PI - interior,
        dhip_dy: (1.0 / (2.0 * a) - (a * a - b * b) / (2.0 * a * height * height)) / sin_hip,
        dknee_dy: height / (a * b * sin_interior),
    })
}

/// A compression-test setup.
#[derive(Debug, Clone)]
pub struct CompressionScenario {
    pub model: LegModel,
    pub setting: StiffnessSetting,
    /// m
    pub max_compression: f64,
    /// Grid spacing (m).
    pub step: f64,
}

impl CompressionScenario {
    pub fn new(model: LegModel, setting: StiffnessSetting) -> Self {
        CompressionScenario {
            model,
            setting,
            max_compression: 0.10,
            step: 5e-4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0 && self.step <= self.max_compression) {
            return Err(Error::Domain(format!(
                "need 0 < step <= max_compression, got step {} and max {}",
                self.step, self.max_compression
            )));
        }
        self.model.validate()
    }

    pub fn mechanism(&self) -> Result<LegMechanism> {
        self.validate()?;
        LegMechanism::new(&self.model, self.setting)
    }
}

/// Crosshead force at `compression` (N).
pub fn reaction_force(scenario: &CompressionScenario, compression: f64) -> Result<f64> {
    if !(0.0..=scenario.max_compression).contains(&compression) {
        return Err(Error::Domain(format!(
            "compression {compression} m lies outside [0, {}] m",
            scenario.max_compression
        )));
    }
    scenario.mechanism()?.reaction_force(compression)
}

/// Compression grid `0, step, 2 step, …, max` paired with the reaction force.
pub fn compression_sweep(scenario: &CompressionScenario) -> Result<Vec<(f64, f64)>> {
    let mech = scenario.mechanism()?;
    let n = (scenario.max_compression / scenario.step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| {
            let y = i as f64 * scenario.step;
            Ok((y, mech.reaction_force(y)?))
        })
        .collect()
}

/// CSV with header `compression_m,force_N`.
pub fn sweep_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("compression_m,force_N\n");
    for (y, f) in rows {
        let _ = writeln!(out, "{y},{f}");
    }
    out
}
