//! Leg geometry, characterization-rig kinematics and joint restoring torque.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::rotary::AntagonisticJoint;
use crate::springs::SpringNetwork;

/// Standard gravity (m/s²).
pub const GRAVITY: f64 = 9.80665;

/// Spring rate of each spring in the staged network (N/m).
pub const STAGED_SPRING_RATE: f64 = 388.4;
/// Slack lengths at which the three staged springs engage (m).
pub const STAGED_OFFSETS: [f64; 3] = [0.0, 0.012, 0.036];

/// The default per-side network: three parallel springs engaging in stages.
pub fn staged_network() -> SpringNetwork {
    SpringNetwork::parallel_slack(STAGED_SPRING_RATE, &STAGED_OFFSETS)
        .expect("staged network constants are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Joint {
    Hip,
    Knee,
}

/// Slider displacement of the stiffness mechanism, i.e. the pretension
/// stretch applied to every spring network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessSetting {
    /// m
    pub slider_displacement: f64,
}

impl StiffnessSetting {
    pub const MINIMUM: StiffnessSetting = StiffnessSetting {
        slider_displacement: 0.0,
    };
    pub const MEDIUM: StiffnessSetting = StiffnessSetting {
        slider_displacement: 0.020,
    };
    pub const MAXIMUM: StiffnessSetting = StiffnessSetting {
        slider_displacement: 0.040,
    };

    pub fn new(slider_displacement: f64) -> Result<Self> {
        if !(slider_displacement.is_finite() && slider_displacement >= 0.0) {
            return Err(Error::Domain(format!(
                "slider displacement must be >= 0, got {slider_displacement}"
            )));
        }
        Ok(StiffnessSetting {
            slider_displacement,
        })
    }

    /// The three settings used throughout the experiments: 0, 20 and 40 mm.
    pub fn defaults() -> [StiffnessSetting; 3] {
        [Self::MINIMUM, Self::MEDIUM, Self::MAXIMUM]
    }
}

/// Planar leg: pelvis, femur and tibia in a vertical plane, hip and knee
/// driven by antagonistic cables over the tristar pulleys.
#[derive(Debug, Clone, PartialEq)]
pub struct LegModel {
    /// Rigid pelvis offset above the hip axis (m).
    pub l_pelvis: f64,
    /// Hip to knee (m).
    pub l_femur: f64,
    /// Knee to foot tip (m).
    pub l_tibia: f64,
    /// Pelvis + femur + tibia (m).
    pub total_extended_length: f64,
    /// Femur inclination from the stretched alignment at rest (rad).
    pub rest_flexion_hip: f64,
    /// Tibia inclination from the stretched alignment at rest (rad). The knee
    /// bends by `rest_flexion_hip - rest_flexion_knee`.
    pub rest_flexion_knee: f64,
    /// Winch drum radius (m).
    pub r_drum: f64,
    /// Tristar pulley radius, the cable moment arm at each joint (m).
    pub r_tristar: f64,
    /// Per-side spring network of the hip.
    pub hip_network: SpringNetwork,
    /// Per-side spring network of the knee.
    pub knee_network: SpringNetwork,
    /// Leg mass lumped at the pelvis (kg).
    pub lumped_mass: f64,
    /// Viscous damping on the pelvis during ground contact (N·s/m).
    pub damping_c: f64,
}

impl Default for LegModel {
    fn default() -> Self {
        LegModel {
            l_pelvis: 0.13,
            l_femur: 0.35,
            l_tibia: 0.35,
            total_extended_length: 0.83,
            rest_flexion_hip: 25f64.to_radians(),
            rest_flexion_knee: -25f64.to_radians(),
            r_drum: 0.005,
            r_tristar: 0.060,
            hip_network: staged_network(),
            knee_network: staged_network(),
            lumped_mass: 1.0,
            damping_c: 5.0,
        }
    }
}

impl LegModel {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("l_pelvis", self.l_pelvis)?;
        positive("l_femur", self.l_femur)?;
        positive("l_tibia", self.l_tibia)?;
        positive("r_drum", self.r_drum)?;
        positive("r_tristar", self.r_tristar)?;
        let sum = self.l_pelvis + self.l_femur + self.l_tibia;
        if (sum - self.total_extended_length).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "segment lengths sum to {sum} m but total_extended_length is {} m",
                self.total_extended_length
            )));
        }
        if self.r_drum >= self.r_tristar {
            return Err(Error::Domain(format!(
                "r_drum ({}) must be smaller than r_tristar ({})",
                self.r_drum, self.r_tristar
            )));
        }
        let bend = self.rest_knee_flexion();
        if !(bend.is_finite() && bend > 0.0 && bend < PI) {
            return Err(Error::Domain(format!(
                "rest knee flexion must lie in (0, π), got {bend} rad"
            )));
        }
        if !(self.lumped_mass.is_finite() && self.lumped_mass >= 0.0) {
            return Err(Error::Domain(format!(
                "lumped_mass must be >= 0, got {}",
                self.lumped_mass
            )));
        }
        if !(self.damping_c.is_finite() && self.damping_c >= 0.0) {
            return Err(Error::Domain(format!(
                "damping_c must be >= 0, got {}",
                self.damping_c
            )));
        }
        self.hip_network.validate()?;
        self.knee_network.validate()
    }

    /// Knee bend at rest, relative to the stretched alignment (rad).
    pub fn rest_knee_flexion(&self) -> f64 {
        self.rest_flexion_hip - self.rest_flexion_knee
    }

    pub fn network(&self, joint: Joint) -> &SpringNetwork {
        match joint {
            Joint::Hip => &self.hip_network,
            Joint::Knee => &self.knee_network,
        }
    }

    /// The antagonistic joint seen at `joint` for a slider setting.
    pub fn antagonistic_joint(&self, setting: StiffnessSetting, joint: Joint) -> Result<AntagonisticJoint> {
        AntagonisticJoint::symmetric(
            self.r_tristar,
            self.network(joint).clone(),
            setting.slider_displacement,
        )
    }
}

/// Joint angle of the characterization rig, `2 asin(h / (2 l1))`.
pub fn phi_from_h(h: f64, l1: f64) -> Result<f64> {
    ensure_finite("h", h)?;
    if !(l1.is_finite() && l1 > 0.0) {
        return Err(Error::Domain(format!("l1 must be > 0, got {l1}")));
    }
    if !(0.0..=2.0 * l1).contains(&h) {
        return Err(Error::Domain(format!("h = {h} m lies outside [0, {}] m", 2.0 * l1)));
    }
    Ok(2.0 * (h / (2.0 * l1)).min(1.0).asin())
}

/// Crosshead distance for a rig joint angle, `2 l1 sin(φ / 2)`.
pub fn h_from_phi(phi: f64, l1: f64) -> Result<f64> {
    ensure_finite("phi", phi)?;
    if !(l1.is_finite() && l1 > 0.0) {
        return Err(Error::Domain(format!("l1 must be > 0, got {l1}")));
    }
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} rad lies outside [0, π]")));
    }
    Ok(2.0 * l1 * (phi / 2.0).sin())
}

/// Torque balanced by the joint when the rig measures force `force`,
/// `F l1 cos(φ / 2)`.
pub fn rig_torque(force: f64, l1: f64, phi: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} rad lies outside [0, π]")));
    }
    if phi == PI {
        return Ok(0.0);
    }
    Ok(force * l1 * (phi / 2.0).cos())
}

/// Restoring torque of `joint` deflected by `dtheta` from rest.
pub fn joint_restoring_torque(
    model: &LegModel,
    setting: StiffnessSetting,
    joint: Joint,
    dtheta: f64,
) -> Result<f64> {
    model.antagonistic_joint(setting, joint)?.torque(dtheta)
}

/// Winch torque needed to hold `payload_mass` at the tip of the stretched leg,
/// `½ m g l · safety_factor · r_drum / r_tristar`.
pub fn required_actuation_torque(model: &LegModel, payload_mass: f64, safety_factor: f64) -> Result<f64> {
    if !(payload_mass.is_finite() && payload_mass >= 0.0) {
        return Err(Error::Domain(format!("payload mass must be >= 0, got {payload_mass}")));
    }
    if !(safety_factor.is_finite() && safety_factor > 0.0) {
        return Err(Error::Domain(format!("safety factor must be > 0, got {safety_factor}")));
    }
    Ok(0.5 * payload_mass * GRAVITY * model.total_extended_length * safety_factor * model.r_drum
        / model.r_tristar)
}
