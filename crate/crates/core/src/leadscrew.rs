//! Power-screw dimensioning for the pretension slider.
//!
//! Torques follow the square-thread power-screw relations without a collar
//! term. Two evaluation modes are kept side by side: [`FormulaMode::Standard`]
//! evaluates `(F D_m / 2)(L + π μ D_m)/(π D_m − μ L)` as written, and
//! [`FormulaMode::Compat`] evaluates half of it, which is the convention the
//! reference design figures (0.2027 N·m raise, 0.0057 N·m lower) were
//! computed with.

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaMode {
    /// The textbook expression, evaluated literally.
    Standard,
    /// Half the textbook expression.
    #[serde(rename = "paper-compat")]
    Compat,
}

impl FormulaMode {
    fn factor(self) -> f64 {
        match self {
            FormulaMode::Standard => 1.0,
            FormulaMode::Compat => 0.5,
        }
    }
}

impl fmt::Display for FormulaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormulaMode::Standard => "standard",
            FormulaMode::Compat => "paper-compat",
        })
    }
}

/// Screw geometry, friction and load.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadScrewSpec {
    /// Mean thread diameter (m).
    pub mean_diameter: f64,
    /// Axial advance per revolution (m/rev).
    pub lead: f64,
    /// Thread friction coefficient.
    pub friction: f64,
    /// Axial load on the nut (N).
    pub axial_force: f64,
    /// Torque the drive motor can supply (N·m).
    pub motor_torque: Option<f64>,
}

impl LeadScrewSpec {
    pub fn new(
        mean_diameter: f64,
        lead: f64,
        friction: f64,
        axial_force: f64,
        motor_torque: Option<f64>,
    ) -> Result<Self> {
        let spec = LeadScrewSpec {
            mean_diameter,
            lead,
            friction,
            axial_force,
            motor_torque,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::Domain(msg)) };
        check(
            self.mean_diameter.is_finite() && self.mean_diameter > 0.0,
            format!("mean diameter must be > 0, got {}", self.mean_diameter),
        )?;
        check(
            self.lead.is_finite() && self.lead > 0.0,
            format!("lead must be > 0, got {}", self.lead),
        )?;
        check(
            (0.0..1.0).contains(&self.friction),
            format!("friction must lie in [0, 1), got {}", self.friction),
        )?;
        check(
            self.axial_force.is_finite() && self.axial_force >= 0.0,
            format!("axial force must be >= 0, got {}", self.axial_force),
        )?;
        if let Some(t) = self.motor_torque {
            check(
                t.is_finite() && t >= 0.0,
                format!("motor torque must be >= 0, got {t}"),
            )?;
        }
        Ok(())
    }
}

/// Axial load from `n_springs` spring paths each at `per_spring_force`.
pub fn axial_force_from_springs(per_spring_force: f64, n_springs: u32) -> Result<f64> {
    if !(per_spring_force.is_finite() && per_spring_force >= 0.0) {
        return Err(Error::Domain(format!(
            "per-spring force must be >= 0, got {per_spring_force}"
        )));
    }
    if n_springs == 0 {
        return Err(Error::Domain("at least one spring is required".into()));
    }
    Ok(n_springs as f64 * per_spring_force)
}

/// Lead angle `atan(L / (π D_m))` (rad).
pub fn lead_angle(spec: &LeadScrewSpec) -> f64 {
    (spec.lead / (PI * spec.mean_diameter)).atan()
}

/// Torque to move the nut against the load.
pub fn torque_raise(spec: &LeadScrewSpec, mode: FormulaMode) -> Result<f64> {
    let d = spec.mean_diameter;
    let denom = PI * d - spec.friction * spec.lead;
    if denom <= 0.0 {
        return Err(Error::Geometry(format!(
            "π·D_m − μ·L = {denom:e} <= 0; thread geometry is outside the power-screw regime"
        )));
    }
    let ratio = (spec.lead + PI * spec.friction * d) / denom;
    Ok(mode.factor() * spec.axial_force * d / 2.0 * ratio)
}

/// Lowering torque `(F D_m / 2)(L − π μ D_m)/(π D_m + μ L)` with the sign as
/// that expression produces it: positive means the load back-drives the screw.
pub fn torque_lower(spec: &LeadScrewSpec, mode: FormulaMode) -> f64 {
    let d = spec.mean_diameter;
    let ratio = (spec.lead - PI * spec.friction * d) / (PI * d + spec.friction * spec.lead);
    mode.factor() * spec.axial_force * d / 2.0 * ratio
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoweringRegime {
    /// Friction holds the load; torque must be applied to lower it.
    HoldsLoad,
    /// The load drives the screw backwards; torque must be applied to hold it.
    BackDrives,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lowering {
    /// |T_lower| (N·m).
    pub magnitude: f64,
    pub regime: LoweringRegime,
}

pub fn lowering(spec: &LeadScrewSpec, mode: FormulaMode) -> Lowering {
    let regime = if self_locking(spec).self_locking {
        LoweringRegime::HoldsLoad
    } else {
        LoweringRegime::BackDrives
    };
    Lowering {
        magnitude: torque_lower(spec, mode).abs(),
        regime,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfLocking {
    pub self_locking: bool,
    pub mu: f64,
    pub tan_lambda: f64,
}

/// Strict criterion `μ > tan λ`.
pub fn self_locking(spec: &LeadScrewSpec) -> SelfLocking {
    let tan_lambda = lead_angle(spec).tan();
    SelfLocking {
        self_locking: spec.friction > tan_lambda,
        mu: spec.friction,
        tan_lambda,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotorFeasibility {
    /// Raise torque in the requested mode (N·m).
    pub required: f64,
    pub available: f64,
    /// available / required.
    pub margin: f64,
    pub feasible: bool,
}

pub fn motor_feasibility(spec: &LeadScrewSpec, mode: FormulaMode) -> Result<MotorFeasibility> {
    let available = spec
        .motor_torque
        .ok_or_else(|| Error::Config("motor torque is not configured".into()))?;
    let required = torque_raise(spec, mode)?;
    Ok(MotorFeasibility {
        required,
        available,
        margin: if required > 0.0 {
            available / required
        } else {
            f64::INFINITY
        },
        feasible: available >= required,
    })
}

/// Per-mode torques.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub mode: FormulaMode,
    pub torque_raise_nm: f64,
    pub torque_lower_nm: f64,
    pub lowering: Lowering,
    pub motor: Option<MotorFeasibility>,
}

/// Everything the dimensioning step produces for one screw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensioningReport {
    pub spec: LeadScrewSpec,
    pub lead_angle_rad: f64,
    pub lead_angle_deg: f64,
    pub self_locking: SelfLocking,
    pub modes: Vec<ModeReport>,
    pub notes: Vec<String>,
}

/// μ within this fraction of tan λ is reported as a marginal locking case.
const MARGINAL_LOCKING_BAND: f64 = 0.1;

pub fn dimensioning_report(spec: &LeadScrewSpec, modes: &[FormulaMode]) -> Result<DimensioningReport> {
    spec.validate()?;
    let lambda = lead_angle(spec);
    let locking = self_locking(spec);
    let modes = modes
        .iter()
        .map(|&mode| {
            Ok(ModeReport {
                mode,
                torque_raise_nm: torque_raise(spec, mode)?,
                torque_lower_nm: torque_lower(spec, mode),
                lowering: lowering(spec, mode),
                motor: match spec.motor_torque {
                    Some(_) => Some(motor_feasibility(spec, mode)?),
                    None => None,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut notes = Vec::new();
    let gap = (locking.mu - locking.tan_lambda).abs() / locking.tan_lambda;
    if gap <= MARGINAL_LOCKING_BAND {
        let (relation, verdict) = if locking.self_locking {
            (">", "self-locking")
        } else {
            ("<=", "NOT self-locking")
        };
        notes.push(format!(
            "marginal case: mu = {} {} tan(lambda) = {:.4}; the screw is {} under the strict \
             criterion mu > tan(lambda). Reading this case the other way round is a known \
             inconsistency in the reference dimensioning; the strict verdict is authoritative.",
            locking.mu, relation, locking.tan_lambda, verdict
        ));
    }
    if !locking.self_locking {
        notes.push("a holding torque is required to keep the slider under load".into());
    }
    if modes.len() == 2 {
        notes.push(
            "paper-compat torques are exactly half of the standard evaluation of the same formula"
                .into(),
        );
    }
    Ok(DimensioningReport {
        spec: spec.clone(),
        lead_angle_rad: lambda,
        lead_angle_deg: lambda.to_degrees(),
        self_locking: locking,
        modes,
        notes,
    })
}
