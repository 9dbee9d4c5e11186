//! TOML configuration. Length-valued keys are read in the file's `units`
//! (mm or m, default m, overridable with `--units`); every other quantity is
//! SI. Unset keys fall back to the library defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analysis::{Pipeline, Smoother};
use crate::dynamics::DropScenario;
use crate::error::{Error, Result};
use crate::leadscrew::{axial_force_from_springs, LeadScrewSpec};
use crate::leg::{LegModel, StiffnessSetting, STAGED_OFFSETS, STAGED_SPRING_RATE};
use crate::rigdata::{VariantLabel, DEFAULT_ARM_LENGTH};
use crate::springs::{SpringElement, SpringNetwork};
use crate::statics::CompressionScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Mm,
    M,
}

impl Units {
    /// Converts a length in these units to metres. Division keeps decimal
    /// millimetre values bit-identical to their metre spelling.
    pub fn to_m(self, v: f64) -> f64 {
        match self {
            Units::Mm => v / 1000.0,
            Units::M => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolConfig {
    pub units: Option<Units>,
    /// Slider displacements, in config length units.
    pub settings: Option<Vec<f64>>,
    pub leg: LegConfig,
    pub springs: SpringsConfig,
    pub leadscrew: LeadScrewConfig,
    pub stiffness: StiffnessConfig,
    pub size: SizeConfig,
    pub compression: CompressionConfig,
    pub drop: DropConfig,
    pub analysis: AnalysisConfig,
    pub fit: FitConfig,
    pub characterize: CharacterizeConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LegConfig {
    pub l_pelvis: Option<f64>,
    pub l_femur: Option<f64>,
    pub l_tibia: Option<f64>,
    pub total_extended_length: Option<f64>,
    pub rest_flexion_hip_deg: Option<f64>,
    pub rest_flexion_knee_deg: Option<f64>,
    pub r_drum: Option<f64>,
    pub r_tristar: Option<f64>,
    pub lumped_mass: Option<f64>,
    pub damping_c: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpringsConfig {
    pub hip: Option<NetworkConfig>,
    pub knee: Option<NetworkConfig>,
}

/// A spring network. Stiffnesses are N/m (`k_q` N/m²); offsets are lengths.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkConfig {
    Linear { k: f64, offset: Option<f64> },
    Quadratic { k_l: f64, k_q: f64, offset: Option<f64> },
    ParallelSlack { k: f64, offsets: Vec<f64> },
    Series { children: Vec<NetworkConfig> },
    Parallel { children: Vec<NetworkConfig> },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LeadScrewConfig {
    pub mean_diameter: Option<f64>,
    pub lead: Option<f64>,
    pub friction: Option<f64>,
    pub axial_force: Option<f64>,
    pub per_spring_force: Option<f64>,
    pub n_springs: Option<u32>,
    pub motor_torque: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StiffnessConfig {
    /// Upper end of the rotation sweep (rad).
    pub theta_max: Option<f64>,
    pub points: Option<usize>,
    /// Pulley radius of the single-spring comparison joints (length).
    pub r_p: Option<f64>,
    pub k_s: Option<f64>,
    pub k_c: Option<f64>,
    pub k_l: Option<f64>,
    pub k_q: Option<f64>,
    /// Pretension force of the comparison joints (N).
    pub pretension_force: Option<f64>,
    /// Forces for the pretension-invariance sweep (N).
    pub pretension_sweep: Option<Vec<f64>>,
    /// Extension range of the staged-network fit (length).
    pub fit_max_extension: Option<f64>,
    pub fit_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SizeConfig {
    pub payload_mass: Option<f64>,
    pub safety_factor: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompressionConfig {
    pub max_compression: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DropConfig {
    pub drop_height: Option<f64>,
    pub added_mass: Option<f64>,
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    /// Overrides `leg.damping_c` for the drop.
    pub damping_c: Option<f64>,
    /// Keep every n-th integrator sample in the trace files.
    pub output_every: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    None,
    SavitzkyGolay,
    Butterworth,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub position_filter: Option<FilterKind>,
    pub acceleration_filter: Option<FilterKind>,
    pub sg_window: Option<usize>,
    pub sg_order: Option<usize>,
    pub cutoff_hz: Option<f64>,
    pub butterworth_order: Option<usize>,
    pub zero_phase: Option<bool>,
    pub time_column: Option<String>,
    pub position_column: Option<String>,
    /// Multiplier taking the position column to metres.
    pub position_scale: Option<f64>,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub x_column: Option<String>,
    pub y_column: Option<String>,
    /// Multiplier taking the x column to metres.
    pub x_scale: Option<f64>,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CharacterizeConfig {
    /// Rig arm length (length).
    pub l1: Option<f64>,
    pub variant: Vec<VariantConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantConfig {
    pub cross_section_mm2: f64,
    pub pretension_percent: f64,
    #[serde(default)]
    pub rotation: Vec<PathBuf>,
    #[serde(default)]
    pub compression: Vec<PathBuf>,
}

/// Parameters of the single-spring comparison joints of `stiffness`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessParams {
    pub theta_max: f64,
    pub points: usize,
    pub r_p: f64,
    pub k_s: f64,
    pub k_c: f64,
    pub k_l: f64,
    pub k_q: f64,
    pub pretension_force: f64,
    pub pretension_sweep: Vec<f64>,
    pub fit_max_extension: f64,
    pub fit_step: f64,
}

pub struct Variant {
    pub label: VariantLabel,
    pub rotation: Vec<PathBuf>,
    pub compression: Vec<PathBuf>,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be > 0, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be >= 0, got {v}")))
    }
}

impl ToolConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip(e))))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Resolves a config-relative path.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn units(&self, cli: Option<Units>) -> Units {
        cli.or(self.units).unwrap_or(Units::M)
    }

    /// Length-valued key, converted to metres.
    fn length(&self, units: Units, key: &str, v: Option<f64>, default: f64) -> Result<f64> {
        match v {
            None => Ok(default),
            Some(v) if v.is_finite() => Ok(units.to_m(v)),
            Some(v) => Err(invalid(key, format!("must be finite, got {v}"))),
        }
    }

    pub fn leg_model(&self, cli_units: Option<Units>) -> Result<LegModel> {
        let u = self.units(cli_units);
        let d = LegModel::default();
        let c = &self.leg;
        let l_pelvis = positive("leg.l_pelvis", self.length(u, "leg.l_pelvis", c.l_pelvis, d.l_pelvis)?)?;
        let l_femur = positive("leg.l_femur", self.length(u, "leg.l_femur", c.l_femur, d.l_femur)?)?;
        let l_tibia = positive("leg.l_tibia", self.length(u, "leg.l_tibia", c.l_tibia, d.l_tibia)?)?;
        let total = match c.total_extended_length {
            Some(_) => self.length(u, "leg.total_extended_length", c.total_extended_length, 0.0)?,
            None if c.l_pelvis.is_none() && c.l_femur.is_none() && c.l_tibia.is_none() => {
                d.total_extended_length
            }
            None => l_pelvis + l_femur + l_tibia,
        };
        let model = LegModel {
            l_pelvis,
            l_femur,
            l_tibia,
            total_extended_length: total,
            rest_flexion_hip: c.rest_flexion_hip_deg.map_or(d.rest_flexion_hip, f64::to_radians),
            rest_flexion_knee: c.rest_flexion_knee_deg.map_or(d.rest_flexion_knee, f64::to_radians),
            r_drum: positive("leg.r_drum", self.length(u, "leg.r_drum", c.r_drum, d.r_drum)?)?,
            r_tristar: positive("leg.r_tristar", self.length(u, "leg.r_tristar", c.r_tristar, d.r_tristar)?)?,
            hip_network: self.network(u, "springs.hip", self.springs.hip.as_ref())?,
            knee_network: self.network(u, "springs.knee", self.springs.knee.as_ref())?,
            lumped_mass: non_negative("leg.lumped_mass", c.lumped_mass.unwrap_or(d.lumped_mass))?,
            damping_c: non_negative("leg.damping_c", c.damping_c.unwrap_or(d.damping_c))?,
        };
        model.validate().map_err(|e| invalid("leg", strip(e)))?;
        Ok(model)
    }

    fn network(&self, u: Units, key: &str, cfg: Option<&NetworkConfig>) -> Result<SpringNetwork> {
        let Some(cfg) = cfg else {
            return SpringNetwork::parallel_slack(STAGED_SPRING_RATE, &STAGED_OFFSETS)
                .map_err(|e| invalid(key, strip(e)));
        };
        let with_offset = |e: SpringElement, offset: Option<f64>| -> Result<SpringNetwork> {
            let e = match offset {
                Some(o) => SpringElement::slack(e, u.to_m(o))?,
                None => e,
            };
            SpringNetwork::leaf(e)
        };
        let built = match cfg {
            NetworkConfig::Linear { k, offset } => {
                SpringElement::linear(*k).and_then(|e| with_offset(e, *offset))
            }
            NetworkConfig::Quadratic { k_l, k_q, offset } => {
                SpringElement::quadratic(*k_l, *k_q).and_then(|e| with_offset(e, *offset))
            }
            NetworkConfig::ParallelSlack { k, offsets } => {
                let o: Vec<f64> = offsets.iter().map(|&v| u.to_m(v)).collect();
                SpringNetwork::parallel_slack(*k, &o)
            }
            NetworkConfig::Series { children } | NetworkConfig::Parallel { children } => {
                let kids = children
                    .iter()
                    .enumerate()
                    .map(|(i, ch)| self.network(u, &format!("{key}.children[{i}]"), Some(ch)))
                    .collect::<Result<Vec<_>>>()?;
                if matches!(cfg, NetworkConfig::Series { .. }) {
                    SpringNetwork::series(kids)
                } else {
                    SpringNetwork::parallel(kids)
                }
            }
        };
        built.map_err(|e| match e {
            Error::Config(_) => e,
            other => invalid(key, strip(other)),
        })
    }

    pub fn settings(&self, cli_units: Option<Units>, cli_mm: &[f64]) -> Result<Vec<StiffnessSetting>> {
        let metres: Vec<f64> = if !cli_mm.is_empty() {
            cli_mm.iter().map(|&v| v / 1000.0).collect()
        } else if let Some(s) = &self.settings {
            let u = self.units(cli_units);
            s.iter().map(|&v| u.to_m(v)).collect()
        } else {
            StiffnessSetting::defaults().iter().map(|s| s.slider_displacement).collect()
        };
        if metres.is_empty() {
            return Err(invalid("settings", "at least one setting is required"));
        }
        metres
            .into_iter()
            .map(|v| StiffnessSetting::new(v).map_err(|e| invalid("settings", strip(e))))
            .collect()
    }

    pub fn lead_screw(&self, cli_units: Option<Units>) -> Result<LeadScrewSpec> {
        let u = self.units(cli_units);
        let c = &self.leadscrew;
        let axial = match (c.axial_force, c.per_spring_force, c.n_springs) {
            (Some(f), None, None) => f,
            (None, Some(f), Some(n)) => {
                axial_force_from_springs(f, n).map_err(|e| invalid("leadscrew.per_spring_force", strip(e)))?
            }
            (None, None, None) => 320.0,
            _ => {
                return Err(invalid(
                    "leadscrew",
                    "give either axial_force or both per_spring_force and n_springs",
                ))
            }
        };
        LeadScrewSpec::new(
            self.length(u, "leadscrew.mean_diameter", c.mean_diameter, 0.008)?,
            self.length(u, "leadscrew.lead", c.lead, 0.004)?,
            c.friction.unwrap_or(0.15),
            axial,
            Some(c.motor_torque.unwrap_or(0.45)),
        )
        .map_err(|e| invalid("leadscrew", strip(e)))
    }

    pub fn stiffness(&self, cli_units: Option<Units>) -> Result<StiffnessParams> {
        let u = self.units(cli_units);
        let c = &self.stiffness;
        let points = c.points.unwrap_or(101);
        if points < 2 {
            return Err(invalid("stiffness.points", format!("must be >= 2, got {points}")));
        }
        let sweep = c.pretension_sweep.clone().unwrap_or_else(|| vec![0.0, 10.0, 20.0]);
        for &f in &sweep {
            non_negative("stiffness.pretension_sweep", f)?;
        }
        Ok(StiffnessParams {
            theta_max: positive("stiffness.theta_max", c.theta_max.unwrap_or(1.0))?,
            points,
            r_p: positive("stiffness.r_p", self.length(u, "stiffness.r_p", c.r_p, 0.05)?)?,
            k_s: non_negative("stiffness.k_s", c.k_s.unwrap_or(500.0))?,
            k_c: non_negative("stiffness.k_c", c.k_c.unwrap_or(100.0))?,
            k_l: non_negative("stiffness.k_l", c.k_l.unwrap_or(450.0))?,
            k_q: non_negative("stiffness.k_q", c.k_q.unwrap_or(20000.0))?,
            pretension_force: non_negative(
                "stiffness.pretension_force",
                c.pretension_force.unwrap_or(10.0),
            )?,
            pretension_sweep: sweep,
            fit_max_extension: positive(
                "stiffness.fit_max_extension",
                self.length(u, "stiffness.fit_max_extension", c.fit_max_extension, 0.05)?,
            )?,
            fit_step: positive("stiffness.fit_step", self.length(u, "stiffness.fit_step", c.fit_step, 0.001)?)?,
        })
    }

    /// `(payload kg, safety factor)`.
    pub fn size(&self) -> Result<(f64, f64)> {
        Ok((
            non_negative("size.payload_mass", self.size.payload_mass.unwrap_or(1.0))?,
            positive("size.safety_factor", self.size.safety_factor.unwrap_or(1.0))?,
        ))
    }

    pub fn compression(
        &self,
        cli_units: Option<Units>,
        model: &LegModel,
        setting: StiffnessSetting,
    ) -> Result<CompressionScenario> {
        let u = self.units(cli_units);
        let mut s = CompressionScenario::new(model.clone(), setting);
        s.max_compression = positive(
            "compression.max_compression",
            self.length(u, "compression.max_compression", self.compression.max_compression, s.max_compression)?,
        )?;
        s.step = positive("compression.step", self.length(u, "compression.step", self.compression.step, s.step)?)?;
        s.validate().map_err(|e| invalid("compression", strip(e)))?;
        Ok(s)
    }

    pub fn drop_scenario(
        &self,
        cli_units: Option<Units>,
        model: &LegModel,
        setting: StiffnessSetting,
    ) -> Result<DropScenario> {
        let u = self.units(cli_units);
        let c = &self.drop;
        let mut s = DropScenario::new(model.clone(), setting);
        s.drop_height = positive("drop.drop_height", self.length(u, "drop.drop_height", c.drop_height, s.drop_height)?)?;
        s.added_mass = non_negative("drop.added_mass", c.added_mass.unwrap_or(s.added_mass))?;
        s.integrator_dt = positive("drop.dt", c.dt.unwrap_or(s.integrator_dt))?;
        s.sim_duration = positive("drop.duration", c.duration.unwrap_or(s.sim_duration))?;
        s.damping_c = non_negative("drop.damping_c", c.damping_c.unwrap_or(s.damping_c))?;
        s.validate().map_err(|e| invalid("drop", strip(e)))?;
        Ok(s)
    }

    pub fn drop_output_every(&self) -> Result<usize> {
        match self.drop.output_every {
            Some(0) => Err(invalid("drop.output_every", "must be >= 1")),
            Some(n) => Ok(n),
            None => Ok(10),
        }
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        let c = &self.analysis;
        let window = c.sg_window.unwrap_or(21);
        let order = c.sg_order.unwrap_or(3);
        if window.is_multiple_of(2) || window <= order {
            return Err(invalid(
                "analysis.sg_window",
                format!("must be odd and greater than sg_order ({order}), got {window}"),
            ));
        }
        let cutoff = positive("analysis.cutoff_hz", c.cutoff_hz.unwrap_or(40.0))?;
        let border = c.butterworth_order.unwrap_or(4);
        if border == 0 {
            return Err(invalid("analysis.butterworth_order", "must be >= 1"));
        }
        let zero_phase = c.zero_phase.unwrap_or(true);
        let make = |kind: FilterKind| match kind {
            FilterKind::None => Smoother::None,
            FilterKind::SavitzkyGolay => Smoother::SavitzkyGolay {
                window,
                poly_order: order,
            },
            FilterKind::Butterworth => Smoother::Butterworth {
                cutoff_hz: cutoff,
                order: border,
                zero_phase,
            },
        };
        Ok(Pipeline {
            position: make(c.position_filter.unwrap_or(FilterKind::SavitzkyGolay)),
            acceleration: make(c.acceleration_filter.unwrap_or(FilterKind::Butterworth)),
        })
    }

    pub fn rig_arm_length(&self, cli_units: Option<Units>) -> Result<f64> {
        let u = self.units(cli_units);
        positive(
            "characterize.l1",
            self.length(u, "characterize.l1", self.characterize.l1, DEFAULT_ARM_LENGTH)?,
        )
    }

    pub fn variants(&self) -> Result<Vec<Variant>> {
        if self.characterize.variant.is_empty() {
            return Err(invalid("characterize.variant", "no variants configured"));
        }
        Ok(self
            .characterize
            .variant
            .iter()
            .map(|v| Variant {
                label: VariantLabel::new(v.cross_section_mm2, v.pretension_percent),
                rotation: v.rotation.iter().map(|p| self.resolve(p)).collect(),
                compression: v.compression.iter().map(|p| self.resolve(p)).collect(),
            })
            .collect())
    }
}

/// The message of an error without its category prefix.
fn strip(e: Error) -> String {
    match e {
        Error::Domain(m) | Error::Config(m) | Error::Geometry(m) | Error::Unsupported(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_library_defaults() {
        let c = ToolConfig::parse("").unwrap();
        assert_eq!(c.leg_model(None).unwrap(), LegModel::default());
        let s = c.settings(None, &[]).unwrap();
        assert_eq!(s, StiffnessSetting::defaults().to_vec());
        let ls = c.lead_screw(None).unwrap();
        assert_eq!((ls.mean_diameter, ls.lead, ls.axial_force), (0.008, 0.004, 320.0));
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let e = ToolConfig::parse("[leg]\nl_femor = 0.35\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("l_femor"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        assert!(ToolConfig::parse("[springs.hip]\ntype = \"linear\"\nk = 1\nq = 2\n").is_err());
    }

    #[test]
    fn mm_and_m_agree_exactly() {
        let mm = ToolConfig::parse(
            "units = \"mm\"\nsettings = [0, 12.5, 40]\n[leg]\nl_pelvis = 130\nl_femur = 350\nl_tibia = 350\nr_tristar = 60\n[springs.hip]\ntype = \"parallel_slack\"\nk = 388.4\noffsets = [0, 12, 36]\n",
        )
        .unwrap();
        let m = ToolConfig::parse(
            "units = \"m\"\nsettings = [0, 0.0125, 0.04]\n[leg]\nl_pelvis = 0.13\nl_femur = 0.35\nl_tibia = 0.35\nr_tristar = 0.06\n[springs.hip]\ntype = \"parallel_slack\"\nk = 388.4\noffsets = [0, 0.012, 0.036]\n",
        )
        .unwrap();
        assert_eq!(mm.leg_model(None).unwrap(), m.leg_model(None).unwrap());
        assert_eq!(mm.settings(None, &[]).unwrap(), m.settings(None, &[]).unwrap());
    }

    #[test]
    fn cli_units_override_file() {
        let c = ToolConfig::parse("units = \"m\"\n[compression]\nmax_compression = 50\n").unwrap();
        let s = c
            .compression(Some(Units::Mm), &LegModel::default(), StiffnessSetting::MINIMUM)
            .unwrap();
        assert_eq!(s.max_compression, 0.05);
    }

    #[test]
    fn cli_settings_are_millimetres() {
        let c = ToolConfig::parse("settings = [0.01]").unwrap();
        let s = c.settings(None, &[20.0]).unwrap();
        assert_eq!(s, vec![StiffnessSetting::MEDIUM]);
    }

    #[test]
    fn invalid_values_name_key() {
        let c = ToolConfig::parse("[leg]\nr_drum = -1\n").unwrap();
        assert!(c.leg_model(None).unwrap_err().to_string().contains("leg.r_drum"));
        let c = ToolConfig::parse("[leadscrew]\naxial_force = 1\nn_springs = 2\n").unwrap();
        assert!(c.lead_screw(None).unwrap_err().to_string().contains("leadscrew"));
        let c = ToolConfig::parse("[analysis]\nsg_window = 4\n").unwrap();
        assert!(c.pipeline().unwrap_err().to_string().contains("analysis.sg_window"));
    }

    #[test]
    fn nested_networks() {
        let c = ToolConfig::parse(
            "[springs.knee]\ntype = \"series\"\n[[springs.knee.children]]\ntype = \"linear\"\nk = 200\n[[springs.knee.children]]\ntype = \"linear\"\nk = 200\n",
        )
        .unwrap();
        let m = c.leg_model(None).unwrap();
        assert_eq!(m.knee_network.effective_linear_stiffness().unwrap(), 100.0);
    }
}
