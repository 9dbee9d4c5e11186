//! Reduction of joint characterization records from the tensile machine and
//! comparison of tendon variants.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::Serialize;

use crate::analysis::{ingest_csv, r_squared, CsvSchema};
use crate::error::{Error, Result};
use crate::leg::{phi_from_h, rig_torque};

/// Arm length of the rotation rig (m).
pub const DEFAULT_ARM_LENGTH: f64 = 0.310;

/// Tendon cross-section and pretension of one variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariantLabel {
    pub cross_section_mm2: f64,
    pub pretension_percent: f64,
}

impl VariantLabel {
    pub fn new(cross_section_mm2: f64, pretension_percent: f64) -> Self {
        VariantLabel {
            cross_section_mm2,
            pretension_percent,
        }
    }

    /// The variant chosen for the leg.
    pub const REFERENCE_PICK: VariantLabel = VariantLabel {
        cross_section_mm2: 12.0,
        pretension_percent: 90.0,
    };
}

impl fmt::Display for VariantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}mm2/{}%", self.cross_section_mm2, self.pretension_percent)
    }
}

/// Crosshead distance `h` (m) against machine force (N) while the joint is
/// rotated, `h` decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationTestRecord {
    pub l1: f64,
    pub samples: Vec<(f64, f64)>,
    pub label: VariantLabel,
}

/// Compression (m) against force (N) under coaxial loading.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionTestRecord {
    pub samples: Vec<(f64, f64)>,
    pub label: VariantLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationPoint {
    pub phi_deg: f64,
    pub torque_nm: f64,
}

impl RotationTestRecord {
    pub fn new(samples: Vec<(f64, f64)>, label: VariantLabel) -> Self {
        RotationTestRecord {
            l1: DEFAULT_ARM_LENGTH,
            samples,
            label,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::Domain(format!("rotation record {} has no samples", self.label)));
        }
        let upper = 2.0 * self.l1;
        for (i, &(h, f)) in self.samples.iter().enumerate() {
            if !(h.is_finite() && (0.0..=upper).contains(&h)) {
                return Err(Error::Domain(format!(
                    "sample {i}: h = {h} m lies outside [0, {upper}] m"
                )));
            }
            if !f.is_finite() {
                return Err(Error::Domain(format!("sample {i}: force {f} is not finite")));
            }
            if i > 0 && h > self.samples[i - 1].0 {
                return Err(Error::Domain(format!(
                    "sample {i}: h must not increase ({} then {h})",
                    self.samples[i - 1].0
                )));
            }
        }
        Ok(())
    }
}

/// `(φ, M)` curve of a rotation test. The first sample's force is taken as
/// the zero, and force magnitudes are used since the machine sign convention
/// varies between exports.
pub fn reduce_rotation_test(rec: &RotationTestRecord) -> Result<Vec<RotationPoint>> {
    rec.validate()?;
    let baseline = rec.samples[0].1;
    let mut out = rec
        .samples
        .iter()
        .map(|&(h, f)| {
            let phi = phi_from_h(h, rec.l1)?;
            Ok(RotationPoint {
                phi_deg: phi.to_degrees(),
                torque_nm: rig_torque((f - baseline).abs(), rec.l1, phi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.phi_deg.total_cmp(&a.phi_deg));
    Ok(out)
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_compression_stiffness(rec: &CompressionTestRecord) -> Result<LinearFit> {
    let n = rec.samples.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "compression record {} needs at least 2 samples, got {n}",
            rec.label
        )));
    }
    for (i, w) in rec.samples.windows(2).enumerate() {
        if !(w[1].0 >= w[0].0) {
            return Err(Error::Domain(format!(
                "sample {}: displacement must not decrease ({} then {})",
                i + 1,
                w[0].0,
                w[1].0
            )));
        }
    }
    let nf = n as f64;
    let mx = rec.samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let my = rec.samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let sxx: f64 = rec.samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = rec.samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Rank(format!(
            "compression record {} has no displacement spread",
            rec.label
        )));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let y: Vec<f64> = rec.samples.iter().map(|s| s.1).collect();
    let fitted: Vec<f64> = rec.samples.iter().map(|s| intercept + slope * s.0).collect();
    Ok(LinearFit {
        slope,
        intercept,
        r_squared: r_squared(&y, &fitted),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RigRecord {
    Rotation(RotationTestRecord),
    Compression(CompressionTestRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSummary {
    pub label: String,
    pub variant: VariantLabel,
    /// Largest |M| over all rotation sweeps (N·m).
    pub peak_torque_nm: f64,
    /// Mean compression slope over the variant's compression records (N/m).
    pub compression_stiffness_npm: f64,
    pub compression_r_squared: f64,
    /// No other variant is at least as good on both metrics and better on one.
    pub pareto_optimal: bool,
    /// Better than or equal to every other variant on both metrics.
    pub dominates_all: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantReport {
    /// Best first.
    pub ranking: Vec<VariantSummary>,
    /// Whether the reference pick dominates the others; `None` when it is
    /// not among the records.
    pub reference_pick_dominates: Option<bool>,
}

/// Lower peak torque first, then stiffer in compression, then label.
pub fn rank_order(a: &VariantSummary, b: &VariantSummary) -> Ordering {
    a.peak_torque_nm
        .total_cmp(&b.peak_torque_nm)
        .then(b.compression_stiffness_npm.total_cmp(&a.compression_stiffness_npm))
        .then_with(|| a.label.cmp(&b.label))
}

fn dominates(a: &VariantSummary, b: &VariantSummary) -> bool {
    a.peak_torque_nm <= b.peak_torque_nm
        && a.compression_stiffness_npm >= b.compression_stiffness_npm
        && (a.peak_torque_nm < b.peak_torque_nm
            || a.compression_stiffness_npm > b.compression_stiffness_npm)
}

pub fn compare_variants(records: &[RigRecord]) -> Result<VariantReport> {
    #[derive(Default)]
    struct Acc {
        variant: Option<VariantLabel>,
        peak: Option<f64>,
        fits: Vec<LinearFit>,
    }
    let mut groups: BTreeMap<String, Acc> = BTreeMap::new();
    for rec in records {
        match rec {
            RigRecord::Rotation(r) => {
                let acc = groups.entry(r.label.to_string()).or_default();
                acc.variant = Some(r.label);
                let peak = reduce_rotation_test(r)?
                    .iter()
                    .fold(0.0f64, |m, p| m.max(p.torque_nm.abs()));
                acc.peak = Some(acc.peak.map_or(peak, |p| p.max(peak)));
            }
            RigRecord::Compression(c) => {
                let acc = groups.entry(c.label.to_string()).or_default();
                acc.variant = Some(c.label);
                acc.fits.push(linear_compression_stiffness(c)?);
            }
        }
    }
    if groups.is_empty() {
        return Err(Error::IncompleteVariant("no records given".into()));
    }
    let mut ranking = Vec::with_capacity(groups.len());
    for (label, acc) in groups {
        let peak = acc.peak.ok_or_else(|| {
            Error::IncompleteVariant(format!("{label} has no rotation record"))
        })?;
        if acc.fits.is_empty() {
            return Err(Error::IncompleteVariant(format!(
                "{label} has no compression record"
            )));
        }
        let k = acc.fits.len() as f64;
        ranking.push(VariantSummary {
            label,
            variant: acc.variant.expect("set with every record"),
            peak_torque_nm: peak,
            compression_stiffness_npm: acc.fits.iter().map(|f| f.slope).sum::<f64>() / k,
            compression_r_squared: acc.fits.iter().map(|f| f.r_squared).sum::<f64>() / k,
            pareto_optimal: false,
            dominates_all: false,
        });
    }
    let flags: Vec<(bool, bool)> = ranking
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let others = || ranking.iter().enumerate().filter(move |(j, _)| *j != i);
            (
                !others().any(|(_, w)| dominates(w, v)),
                others().all(|(_, w)| dominates(v, w)),
            )
        })
        .collect();
    for (v, (pareto, all)) in ranking.iter_mut().zip(flags) {
        v.pareto_optimal = pareto;
        v.dominates_all = all;
    }
    ranking.sort_by(rank_order);
    let reference = VariantLabel::REFERENCE_PICK.to_string();
    let reference_pick_dominates = ranking
        .iter()
        .find(|v| v.label == reference)
        .map(|v| v.dominates_all);
    Ok(VariantReport {
        ranking,
        reference_pick_dominates,
    })
}

impl VariantReport {
    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<4} {:<14} {:>14} {:>18} {:>8} {:>7}\n",
            "rank", "variant", "peak_M_Nm", "compression_N_m", "r2", "pareto"
        );
        for (i, v) in self.ranking.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<4} {:<14} {:>14.4} {:>18.1} {:>8.4} {:>7}",
                i + 1,
                v.label,
                v.peak_torque_nm,
                v.compression_stiffness_npm,
                v.compression_r_squared,
                if v.pareto_optimal { "yes" } else { "no" }
            );
        }
        out
    }
}

/// Rotation record from a CSV with columns `h_m,F_N`.
pub fn load_rotation_csv(path: &Path, label: VariantLabel, l1: f64) -> Result<RotationTestRecord> {
    let t = ingest_csv(path, &CsvSchema::new("h_m", "F_N"))?;
    Ok(RotationTestRecord {
        l1,
        samples: t.x.into_iter().zip(t.y).collect(),
        label,
    })
}

/// Compression record from a CSV with columns `x_m,F_N`.
pub fn load_compression_csv(path: &Path, label: VariantLabel) -> Result<CompressionTestRecord> {
    let t = ingest_csv(path, &CsvSchema::new("x_m", "F_N"))?;
    Ok(CompressionTestRecord {
        samples: t.x.into_iter().zip(t.y).collect(),
        label,
    })
}
