use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ToolConfig, Units};
use super::output::{csv_table, gnuplot, paint, setting_tag, Curve, Emitter};
use crate::analysis::{fit_unbiased_quadratic, ingest_csv, CsvSchema, FitResult};
use crate::dynamics::{drop_metrics, peak_reduction_percent, simulate_drop, trace_csv, DropMetrics};
use crate::error::{Error, Result};
use crate::leadscrew::{dimensioning_report, DimensioningReport, FormulaMode, LoweringRegime};
use crate::leg::{required_actuation_torque, Joint, StiffnessSetting};
use crate::rigdata::{
    compare_variants, load_compression_csv, load_rotation_csv, reduce_rotation_test, RigRecord,
};
use crate::rotary::{rotational_stiffness_linear, rotational_stiffness_quadratic, AntagonisticJoint};
use crate::springs::SpringElement;
use crate::statics::{compression_sweep, sweep_csv};

/// Options shared by every subcommand.
pub struct Context {
    pub config: ToolConfig,
    pub units: Option<Units>,
    pub settings_mm: Vec<f64>,
    pub modes: Vec<FormulaMode>,
}

impl Context {
    fn settings(&self) -> Result<Vec<StiffnessSetting>> {
        self.config.settings(self.units, &self.settings_mm)
    }
}

fn theta_grid(max: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| max * i as f64 / (points - 1) as f64).collect()
}

#[derive(Serialize)]
struct StagedTangent {
    slider_displacement_m: f64,
    rest_tangent_nm_per_rad: f64,
}

#[derive(Serialize)]
struct StiffnessSummary {
    linear_single_side_nm_per_rad: f64,
    linear_antagonistic_rest_nm_per_rad: f64,
    linear_pretension_x0_m: f64,
    quadratic_single_side_rest_nm_per_rad: f64,
    quadratic_antagonistic_rest_nm_per_rad: f64,
    quadratic_pretension_x0_m: f64,
    staged_rest_tangents: Vec<StagedTangent>,
    staged_network_fit: FitResult,
}

pub fn stiffness(ctx: &Context, out: &mut Emitter) -> Result<()> {
    let p = ctx.config.stiffness(ctx.units)?;
    let model = ctx.config.leg_model(ctx.units)?;
    let settings = ctx.settings()?;
    let linear = AntagonisticJoint::with_pretension_force(
        p.r_p,
        SpringElement::linear(p.k_s + p.k_c)?,
        p.pretension_force,
    )?;
    let quadratic = AntagonisticJoint::with_pretension_force(
        p.r_p,
        SpringElement::quadratic(p.k_l, p.k_q)?,
        p.pretension_force,
    )?;
    let staged = settings
        .iter()
        .map(|&s| model.antagonistic_joint(s, Joint::Hip))
        .collect::<Result<Vec<_>>>()?;
    let thetas = theta_grid(p.theta_max, p.points);
    let tags: Vec<String> = settings.iter().map(|s| setting_tag(s.slider_displacement)).collect();

    let mut header: Vec<String> = vec!["theta_rad".into(), "linear_Nm".into(), "quadratic_Nm".into()];
    header.extend(tags.iter().map(|t| format!("staged_{t}_Nm")));
    let rows = thetas
        .iter()
        .map(|&th| {
            let mut r = vec![th, linear.torque(th)?, quadratic.torque(th)?];
            for j in &staged {
                r.push(j.torque(th)?);
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let configurations = csv_table(&header, rows);
    out.file("spring_configurations.csv", &configurations)?;

    let k_lin = rotational_stiffness_linear(p.k_s, p.k_c, p.r_p)?;
    let mut header: Vec<String> = vec![
        "theta_rad".into(),
        "linear_single_closed_Nm_per_rad".into(),
        "linear_tangent_Nm_per_rad".into(),
        "quadratic_single_closed_Nm_per_rad".into(),
        "quadratic_tangent_Nm_per_rad".into(),
    ];
    header.extend(tags.iter().map(|t| format!("staged_{t}_tangent_Nm_per_rad")));
    let rows = thetas
        .iter()
        .map(|&th| {
            let mut r = vec![
                th,
                k_lin,
                linear.tangent_stiffness(th)?.value,
                rotational_stiffness_quadratic(p.k_l, p.k_q, quadratic.x0, p.r_p, th),
                quadratic.tangent_stiffness(th)?.value,
            ];
            for j in &staged {
                r.push(j.tangent_stiffness(th)?.value);
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    out.file("rotational_stiffness.csv", &csv_table(&header, rows))?;

    let rows = p
        .pretension_sweep
        .iter()
        .map(|&f0| {
            let l = AntagonisticJoint::with_pretension_force(p.r_p, SpringElement::linear(p.k_s + p.k_c)?, f0)?;
            let q = AntagonisticJoint::with_pretension_force(p.r_p, SpringElement::quadratic(p.k_l, p.k_q)?, f0)?;
            Ok(vec![
                f0,
                l.x0,
                l.tangent_stiffness(0.0)?.value,
                q.x0,
                q.tangent_stiffness(0.0)?.value,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let header: Vec<String> = [
        "pretension_N",
        "linear_x0_m",
        "linear_rest_tangent_Nm_per_rad",
        "quadratic_x0_m",
        "quadratic_rest_tangent_Nm_per_rad",
    ]
    .map(String::from)
    .to_vec();
    out.file("pretension_sweep.csv", &csv_table(&header, rows))?;

    let n = (p.fit_max_extension / p.fit_step + 1e-9).floor() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * p.fit_step).collect();
    let fs = xs
        .iter()
        .map(|&x| model.hip_network.force(x))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_unbiased_quadratic(&xs, &fs)?;
    let header: Vec<String> = ["x_m", "F_N", "fit_N"].map(String::from).to_vec();
    let rows = xs.iter().zip(&fs).map(|(&x, &f)| vec![x, f, fit.eval(x)]);
    out.file("staged_spring_fit.csv", &csv_table(&header, rows))?;

    let summary = StiffnessSummary {
        linear_single_side_nm_per_rad: k_lin,
        linear_antagonistic_rest_nm_per_rad: linear.tangent_stiffness(0.0)?.value,
        linear_pretension_x0_m: linear.x0,
        quadratic_single_side_rest_nm_per_rad: rotational_stiffness_quadratic(
            p.k_l,
            p.k_q,
            quadratic.x0,
            p.r_p,
            0.0,
        ),
        quadratic_antagonistic_rest_nm_per_rad: quadratic.tangent_stiffness(0.0)?.value,
        quadratic_pretension_x0_m: quadratic.x0,
        staged_rest_tangents: settings
            .iter()
            .zip(&staged)
            .map(|(s, j)| {
                Ok(StagedTangent {
                    slider_displacement_m: s.slider_displacement,
                    rest_tangent_nm_per_rad: j.tangent_stiffness(0.0)?.value,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        staged_network_fit: fit,
    };
    out.json("stiffness_summary.json", &summary)?;

    let mut curves = vec![
        Curve { file: "spring_configurations.csv".into(), x: 1, y: 2, title: "linear".into() },
        Curve { file: "spring_configurations.csv".into(), x: 1, y: 3, title: "quadratic".into() },
    ];
    for (i, t) in tags.iter().enumerate() {
        curves.push(Curve {
            file: "spring_configurations.csv".into(),
            x: 1,
            y: 4 + i,
            title: format!("staged {t}"),
        });
    }
    out.file(
        "spring_configurations.gp",
        &gnuplot("spring_configurations", "Joint torque by spring configuration", "theta (rad)", "torque (N m)", &curves),
    )?;
    let mut curves = vec![
        Curve { file: "rotational_stiffness.csv".into(), x: 1, y: 3, title: "linear".into() },
        Curve { file: "rotational_stiffness.csv".into(), x: 1, y: 5, title: "quadratic".into() },
    ];
    for (i, t) in tags.iter().enumerate() {
        curves.push(Curve {
            file: "rotational_stiffness.csv".into(),
            x: 1,
            y: 6 + i,
            title: format!("staged {t}"),
        });
    }
    out.file(
        "rotational_stiffness.gp",
        &gnuplot("rotational_stiffness", "Tangent rotational stiffness", "theta (rad)", "stiffness (N m/rad)", &curves),
    )?;
    out.file(
        "staged_spring_fit.gp",
        &gnuplot(
            "staged_spring_fit",
            "Staged springs and unbiased quadratic fit",
            "extension (m)",
            "force (N)",
            &[
                Curve { file: "staged_spring_fit.csv".into(), x: 1, y: 2, title: "network".into() },
                Curve { file: "staged_spring_fit.csv".into(), x: 1, y: 3, title: "fit".into() },
            ],
        ),
    )?;

    let mut text = String::new();
    let _ = writeln!(text, "rotational stiffness");
    let _ = writeln!(text, "  linear single side       {} N m/rad", summary.linear_single_side_nm_per_rad);
    let _ = writeln!(text, "  linear antagonistic      {} N m/rad", summary.linear_antagonistic_rest_nm_per_rad);
    let _ = writeln!(text, "  quadratic single side    {} N m/rad", summary.quadratic_single_side_rest_nm_per_rad);
    let _ = writeln!(text, "  quadratic antagonistic   {} N m/rad", summary.quadratic_antagonistic_rest_nm_per_rad);
    for t in &summary.staged_rest_tangents {
        let _ = writeln!(
            text,
            "  staged {:<17} {} N m/rad",
            setting_tag(t.slider_displacement_m),
            t.rest_tangent_nm_per_rad
        );
    }
    let _ = writeln!(
        text,
        "staged network fit: a = {} N/m^2, b = {} N/m, r2 = {}",
        fit.a, fit.b, fit.r_squared
    );
    out.primary(&text)
}

fn leadscrew_text(r: &DimensioningReport, color: bool) -> String {
    let mut t = String::new();
    let s = &r.spec;
    let _ = writeln!(t, "lead screw dimensioning");
    let _ = writeln!(t, "  mean diameter  {} m", s.mean_diameter);
    let _ = writeln!(t, "  lead           {} m/rev", s.lead);
    let _ = writeln!(t, "  friction       {}", s.friction);
    let _ = writeln!(t, "  axial force    {} N", s.axial_force);
    let _ = writeln!(t, "  lead angle     {} rad ({} deg)", r.lead_angle_rad, r.lead_angle_deg);
    let verdict = if r.self_locking.self_locking {
        paint(color, "self-locking", "1;32")
    } else {
        paint(color, "NOT self-locking", "1;31")
    };
    let _ = writeln!(
        t,
        "  verdict        {verdict} (mu = {}, tan(lambda) = {})",
        r.self_locking.mu, r.self_locking.tan_lambda
    );
    for m in &r.modes {
        let _ = writeln!(t, "mode {}", m.mode);
        let _ = writeln!(t, "  raise torque   {} N m", m.torque_raise_nm);
        let regime = match m.lowering.regime {
            LoweringRegime::HoldsLoad => "torque needed to lower",
            LoweringRegime::BackDrives => "torque needed to hold",
        };
        let _ = writeln!(t, "  lower torque   {} N m ({regime})", m.lowering.magnitude);
        if let Some(mf) = &m.motor {
            let _ = writeln!(
                t,
                "  motor          {} N m available, margin {}, {}",
                mf.available,
                mf.margin,
                if mf.feasible { "feasible" } else { "insufficient" }
            );
        }
    }
    if !r.notes.is_empty() {
        let _ = writeln!(t, "notes");
        for n in &r.notes {
            let _ = writeln!(t, "  - {n}");
        }
    }
    t
}

pub fn leadscrew(ctx: &Context, out: &mut Emitter) -> Result<()> {
    let spec = ctx.config.lead_screw(ctx.units)?;
    let report = dimensioning_report(&spec, &ctx.modes)?;
    out.json("leadscrew_report.json", &report)?;
    out.file("leadscrew_report.txt", &leadscrew_text(&report, false))?;
    let shown = leadscrew_text(&report, out.color);
    out.primary(&shown)
}

#[derive(Serialize)]
struct SizeReport {
    payload_mass_kg: f64,
    safety_factor: f64,
    total_extended_length_m: f64,
    r_drum_m: f64,
    r_tristar_m: f64,
    required_torque_nm: f64,
}

pub fn size(ctx: &Context, out: &mut Emitter) -> Result<()> {
    let model = ctx.config.leg_model(ctx.units)?;
    let (mass, sf) = ctx.config.size()?;
    let report = SizeReport {
        payload_mass_kg: mass,
        safety_factor: sf,
        total_extended_length_m: model.total_extended_length,
        r_drum_m: model.r_drum,
        r_tristar_m: model.r_tristar,
        required_torque_nm: required_actuation_torque(&model, mass, sf)?,
    };
    let text = out.json("size.json", &report)?;
    out.primary(&text)
}

#[derive(Serialize)]
struct CompressRow {
    slider_displacement_m: f64,
    max_compression_m: f64,
    force_at_max_compression_n: f64,
}

#[derive(Serialize)]
struct CompressSummary {
    settings: Vec<CompressRow>,
    /// Largest over smallest end force.
    max_min_force_ratio: f64,
}

pub fn compress(ctx: &Context, out: &mut Emitter) -> Result<()> {
    let model = ctx.config.leg_model(ctx.units)?;
    let settings = ctx.settings()?;
    let mut sweeps = Vec::with_capacity(settings.len());
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &s in &settings {
        let scenario = ctx.config.compression(ctx.units, &model, s)?;
        let sweep = compression_sweep(&scenario)?;
        let tag = setting_tag(s.slider_displacement);
        let name = format!("compress_{tag}.csv");
        out.file(&name, &sweep_csv(&sweep))?;
        curves.push(Curve { file: name, x: 1, y: 2, title: tag });
        let (x_end, f_end) = *sweep.last().expect("sweep has at least one row");
        rows.push(CompressRow {
            slider_displacement_m: s.slider_displacement,
            max_compression_m: x_end,
            force_at_max_compression_n: f_end,
        });
        sweeps.push(sweep);
    }
    let hi = rows.iter().map(|r| r.force_at_max_compression_n).fold(f64::NEG_INFINITY, f64::max);
    let lo = rows.iter().map(|r| r.force_at_max_compression_n).fold(f64::INFINITY, f64::min);
    out.json(
        "compress_summary.json",
        &CompressSummary {
            settings: rows,
            max_min_force_ratio: hi / lo,
        },
    )?;
    out.file(
        "compress.gp",
        &gnuplot("compress", "Reaction force under vertical compression", "compression (m)", "force (N)", &curves),
    )?;
    let mut header = vec!["compression_m".to_string()];
    header.extend(settings.iter().map(|s| format!("force_{}_N", setting_tag(s.slider_displacement))));
    let table = csv_table(
        &header,
        (0..sweeps[0].len()).map(|i| {
            let mut r = vec![sweeps[0][i].0];
            r.extend(sweeps.iter().map(|sw| sw[i].1));
            r
        }),
    );
    out.primary(&table)
}

#[derive(Serialize)]
struct DropRow {
    slider_displacement_m: f64,
    contact_time_s: Option<f64>,
    metrics: DropMetrics,
}

#[derive(Serialize)]
struct DropSummary {
    settings: Vec<DropRow>,
    /// Peak reduction of the softest setting relative to the stiffest.
    peak_reduction_percent: Option<f64>,
}

pub fn drop(ctx: &Context, out: &mut Emitter) -> Result<()> {
    let model = ctx.config.leg_model(ctx.units)?;
    let settings = ctx.settings()?;
    let every = ctx.config.drop_output_every()?;
    let mut rows = Vec::with_capacity(settings.len());
    let mut curves = Vec::new();
    for &s in &settings {
        let scenario = ctx.config.drop_scenario(ctx.units, &model, s)?;
        let trace = simulate_drop(&scenario)?;
        let tag = setting_tag(s.slider_displacement);
        let name = format!("drop_{tag}.csv");
        out.file(&name, &trace_csv(&trace, every))?;
        curves.push(Curve { file: name, x: 1, y: 2, title: tag });
        rows.push(DropRow {
            slider_displacement_m: s.slider_displacement,
            contact_time_s: trace.contact_time,
            metrics: drop_metrics(&trace)?,
        });
    }
    let by_slider = |pick: fn(f64, f64) -> bool| {
        rows.iter()
            .reduce(|a, b| if pick(b.slider_displacement_m, a.slider_displacement_m) { b } else { a })
    };
    let softest = by_slider(|a, b| a < b);
    let stiffest = by_slider(|a, b| a > b);
    let reduction = match (softest, stiffest) {
        (Some(a), Some(b)) if rows.len() > 1 => {
            Some(peak_reduction_percent(b.metrics.peak_acceleration, a.metrics.peak_acceleration))
        }
        _ => None,
    };
    let mut text = format!(
        "{:<10} {:>22} {:>22} {:>22} {:>22}\n",
        "setting", "peak_accel_mps2", "max_deflection_m", "steady_deflection_m", "decel_duration_s"
    );
    for r in &rows {
        let m = &r.metrics;
        let _ = writeln!(
            text,
            "{:<10} {:>22} {:>22} {:>22} {:>22}",
            setting_tag(r.slider_displacement_m),
            m.peak_acceleration,
            m.max_deflection,
            m.steady_state_deflection,
            m.deceleration_duration.map_or("none".to_string(), |d| d.to_string())
        );
    }
    if let Some(p) = reduction {
        let _ = writeln!(text, "peak reduction (softest vs stiffest): {p} %");
    }
    out.json(
        "drop_summary.json",
        &DropSummary {
            settings: rows,
            peak_reduction_percent: reduction,
        },
    )?;
    out.file(
        "drop.gp",
        &gnuplot("drop", "Pelvis height during the drop", "time (s)", "pelvis height (m)", &curves),
    )?;
    out.primary(&text)
}

fn input_path(ctx: &Context, cli: Option<&Path>, cfg: Option<&PathBuf>, what: &str) -> Result<PathBuf> {
    match (cli, cfg) {
        (Some(p), _) => Ok(p.to_path_buf()),
        (None, Some(p)) => Ok(ctx.config.resolve(p)),
        (None, None) => Err(Error::Config(format!(
            "{what}: no input CSV given on the command line or in the config"
        ))),
    }
}

#[derive(Serialize)]
struct FitReport {
    samples: usize,
    #[serde(flatten)]
    fit: FitResult,
}

pub fn fit(ctx: &Context, input: Option<&Path>, out: &mut Emitter) -> Result<()> {
    let c = &ctx.config.fit;
    let path = input_path(ctx, input, c.input.as_ref(), "fit.input")?;
    let schema = CsvSchema::new(
        c.x_column.as_deref().unwrap_or("x_m"),
        c.y_column.as_deref().unwrap_or("F_N"),
    )
    .with_scales(c.x_scale.unwrap_or(1.0), 1.0);
    let table = ingest_csv(&path, &schema)?;
    let fit = fit_unbiased_quadratic(&table.x, &table.y)?;
    let header: Vec<String> = ["x_m", "F_N", "fit_N"].map(String::from).to_vec();
    let rows = table.x.iter().zip(&table.y).map(|(&x, &y)| vec![x, y, fit.eval(x)]);
    out.file("fit.csv", &csv_table(&header, rows))?;
    out.file(
        "fit.gp",
        &gnuplot(
            "fit",
            "Unbiased quadratic fit",
            "extension (m)",
            "force (N)",
            &[
                Curve { file: "fit.csv".into(), x: 1, y: 2, title: "data".into() },
                Curve { file: "fit.csv".into(), x: 1, y: 3, title: "fit".into() },
            ],
        ),
    )?;
    let text = out.json("fit.json", &FitReport { samples: table.x.len(), fit })?;
    out.primary(&text)
}

#[derive(Serialize)]
struct FilterSummary {
    samples: usize,
    dt_s: f64,
    resampled: bool,
    peak_acceleration_mps2: f64,
    min_acceleration_mps2: f64,
}

pub fn filter(ctx: &Context, input: Option<&Path>, out: &mut Emitter) -> Result<()> {
    let c = &ctx.config.analysis;
    let path = input_path(ctx, input, c.input.as_ref(), "analysis.input")?;
    let pipeline = ctx.config.pipeline()?;
    let schema = CsvSchema::new(
        c.time_column.as_deref().unwrap_or("t_s"),
        c.position_column.as_deref().unwrap_or("y_m"),
    )
    .with_scales(1.0, c.position_scale.unwrap_or(1.0));
    let ingested = ingest_csv(&path, &schema)?.to_time_series()?;
    let series = &ingested.series;
    let res = pipeline.run(series)?;
    let header: Vec<String> = ["t_s", "y_m", "y_smooth_m", "vy_mps", "ay_raw_mps2", "ay_mps2"]
        .map(String::from)
        .to_vec();
    let table = csv_table(
        &header,
        (0..series.len()).map(|i| {
            vec![
                series.time(i),
                series.values[i],
                res.position.values[i],
                res.velocity.values[i],
                res.raw_acceleration.values[i],
                res.acceleration.values[i],
            ]
        }),
    );
    out.file("filtered.csv", &table)?;
    let a = &res.acceleration.values;
    out.json(
        "filter_summary.json",
        &FilterSummary {
            samples: series.len(),
            dt_s: series.dt,
            resampled: ingested.resampled,
            peak_acceleration_mps2: a.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_acceleration_mps2: a.iter().copied().fold(f64::INFINITY, f64::min),
        },
    )?;
    out.file(
        "filter.gp",
        &gnuplot(
            "filter",
            "Vertical acceleration of the pelvis",
            "time (s)",
            "acceleration (m/s^2)",
            &[
                Curve { file: "filtered.csv".into(), x: 1, y: 5, title: "raw".into() },
                Curve { file: "filtered.csv".into(), x: 1, y: 6, title: "filtered".into() },
            ],
        ),
    )?;
    out.primary(&table)
}

pub fn characterize(ctx: &Context, out: &mut Emitter) -> Result<()> {
    let l1 = ctx.config.rig_arm_length(ctx.units)?;
    let variants = ctx.config.variants()?;
    let mut records = Vec::new();
    let mut curves = Vec::new();
    for v in &variants {
        if v.rotation.is_empty() || v.compression.is_empty() {
            return Err(Error::IncompleteVariant(format!(
                "{} needs at least one rotation and one compression file",
                v.label
            )));
        }
        let stem = format!(
            "{}mm2_{}pct",
            v.label.cross_section_mm2, v.label.pretension_percent
        );
        for (i, p) in v.rotation.iter().enumerate() {
            let rec = load_rotation_csv(p, v.label, l1)?;
            let pts = reduce_rotation_test(&rec)?;
            let name = format!("rotation_{stem}_{}.csv", i + 1);
            let header: Vec<String> = ["phi_deg", "M_Nm"].map(String::from).to_vec();
            out.file(&name, &csv_table(&header, pts.iter().map(|p| vec![p.phi_deg, p.torque_nm])))?;
            curves.push(Curve { file: name, x: 1, y: 2, title: format!("{} #{}", v.label, i + 1) });
            records.push(RigRecord::Rotation(rec));
        }
        for p in &v.compression {
            records.push(RigRecord::Compression(load_compression_csv(p, v.label)?));
        }
    }
    let report = compare_variants(&records)?;
    out.json("characterize_report.json", &report)?;
    let table = report.to_table();
    out.file("characterize_report.txt", &table)?;
    out.file(
        "characterize.gp",
        &gnuplot("characterize", "Joint torque during rotation", "phi (deg)", "torque (N m)", &curves),
    )?;
    out.primary(&table)
}
