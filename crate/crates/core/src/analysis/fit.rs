use serde::Serialize;

use crate::error::{Error, Result};

/// `F(x) = a x² + b x` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

impl FitResult {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x * x + self.b * x
    }
}

/// `1 - SS_res / SS_tot` with `SS_tot` about the mean of `y`. A constant `y`
/// scores 1 when fitted exactly and `-inf` otherwise.
pub fn r_squared(y: &[f64], fitted: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(fitted).map(|(v, f)| (v - f).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { f64::NEG_INFINITY };
    }
    1.0 - ss_res / ss_tot
}

/// Least squares through the origin on the basis `{x², x}`.
pub fn fit_unbiased_quadratic(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if let Some(v) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite sample {v}")));
    }
    let mut distinct: Vec<f64> = x.iter().copied().filter(|&v| v != 0.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Rank(
            "need at least two distinct non-zero x values to separate x² from x".into(),
        ));
    }
    let s = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (mut s4, mut s3, mut s2, mut t2, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let u = xi / s;
        let u2 = u * u;
        s4 += u2 * u2;
        s3 += u2 * u;
        s2 += u2;
        t2 += u2 * yi;
        t1 += u * yi;
    }
    let det = s4 * s2 - s3 * s3;
    if !(det.abs() > 1e-14 * s4 * s2) {
        return Err(Error::Rank(format!(
            "normal equations are singular (determinant {det:e})"
        )));
    }
    let a_u = (t2 * s2 - t1 * s3) / det;
    let b_u = (s4 * t1 - s3 * t2) / det;
    let mut fit = FitResult {
        a: a_u / (s * s),
        b: b_u / s,
        r_squared: 0.0,
    };
    let fitted: Vec<f64> = x.iter().map(|&v| fit.eval(v)).collect();
    fit.r_squared = r_squared(y, &fitted);
    Ok(fit)
}
