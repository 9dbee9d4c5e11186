use std::f64::consts::PI;

use super::TimeSeries;
use crate::error::{Error, Result};

/// One direct-form II transposed section, `a0` normalised to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Section {
    fn run(&self, x: &mut [f64]) {
        let Some(&first) = x.first() else { return };
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        // Start at the steady state of a constant input equal to the first sample.
        let mut s2 = (b2 - a2) * first;
        let mut s1 = (b1 - a1) * first + s2;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + s1;
            s1 = b1 * input - a1 * y + s2;
            s2 = b2 * input - a2 * y;
            *v = y;
        }
    }

    /// Magnitude response at normalised angular frequency `w` (rad/sample).
    fn magnitude(&self, w: f64) -> f64 {
        let (c1, s1, c2, s2) = (w.cos(), w.sin(), (2.0 * w).cos(), (2.0 * w).sin());
        let num = (self.b[0] + self.b[1] * c1 + self.b[2] * c2, -self.b[1] * s1 - self.b[2] * s2);
        let den = (1.0 + self.a[0] * c1 + self.a[1] * c2, -self.a[0] * s1 - self.a[1] * s2);
        (num.0.hypot(num.1)) / (den.0.hypot(den.1))
    }
}

/// Digital Butterworth low-pass as cascaded second-order sections (plus one
/// first-order section for odd orders).
#[derive(Debug, Clone, PartialEq)]
pub struct ButterworthDesign {
    pub sections: Vec<Section>,
}

impl ButterworthDesign {
    /// Bilinear transform of the analog prototype, prewarped so the -3 dB
    /// point lands on `cutoff_hz`.
    pub fn lowpass(cutoff_hz: f64, sample_rate_hz: f64, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("filter order must be >= 1".into()));
        }
        let nyquist = 0.5 * sample_rate_hz;
        if !(cutoff_hz.is_finite() && cutoff_hz > 0.0 && cutoff_hz < nyquist) {
            return Err(Error::Domain(format!(
                "cutoff must lie in (0, {nyquist}) Hz, got {cutoff_hz}"
            )));
        }
        let k = (PI * cutoff_hz / sample_rate_hz).tan();
        let k2 = k * k;
        let n = order as f64;
        let mut sections = Vec::with_capacity(order.div_ceil(2));
        for i in 0..order / 2 {
            let theta = (2 * i + order + 1) as f64 * PI / (2.0 * n);
            let q = -1.0 / (2.0 * theta.cos());
            let d = 1.0 + k / q + k2;
            let b0 = k2 / d;
            sections.push(Section {
                b: [b0, 2.0 * b0, b0],
                a: [2.0 * (k2 - 1.0) / d, (1.0 - k / q + k2) / d],
            });
        }
        if order % 2 == 1 {
            let b0 = k / (1.0 + k);
            sections.push(Section {
                b: [b0, b0, 0.0],
                a: [(k - 1.0) / (k + 1.0), 0.0],
            });
        }
        Ok(ButterworthDesign { sections })
    }

    pub fn filter_in_place(&self, x: &mut [f64]) {
        for s in &self.sections {
            s.run(x);
        }
    }

    /// |H| at `freq_hz` for sampling rate `sample_rate_hz`.
    pub fn magnitude(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / sample_rate_hz;
        self.sections.iter().map(|s| s.magnitude(w)).product()
    }
}

/// Low-pass filter a series. With `zero_phase` the filter runs forward and
/// then backward over an odd extension of the ends, which squares the
/// magnitude response and cancels the phase.
pub fn butterworth_lowpass(
    series: &TimeSeries,
    cutoff_hz: f64,
    order: usize,
    zero_phase: bool,
) -> Result<TimeSeries> {
    let design = ButterworthDesign::lowpass(cutoff_hz, 1.0 / series.dt, order)?;
    let x = &series.values;
    if x.is_empty() {
        return Ok(series.clone());
    }
    if !zero_phase {
        let mut y = x.clone();
        design.filter_in_place(&mut y);
        return Ok(series.with_values(y));
    }
    let n = x.len();
    let pad = (3 * (order + 1)).min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|j| 2.0 * x[0] - x[j]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|j| 2.0 * x[n - 1] - x[n - 1 - j]));
    design.filter_in_place(&mut ext);
    ext.reverse();
    design.filter_in_place(&mut ext);
    ext.reverse();
    Ok(series.with_values(ext[pad..pad + n].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 1000.0;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(0.0, 1.0 / FS, values).unwrap()
    }

    /// Least-squares amplitude at `f` over whole periods of `x[start..]`.
    fn amplitude(x: &[f64], f: f64, start: usize) -> f64 {
        let period = FS / f;
        let periods = ((x.len() - start) as f64 / period).floor();
        let end = start + (periods * period).round() as usize;
        let (mut s, mut c) = (0.0, 0.0);
        for (i, v) in x.iter().enumerate().take(end).skip(start) {
            let ph = 2.0 * PI * f * i as f64 / FS;
            s += v * ph.sin();
            c += v * ph.cos();
        }
        2.0 * s.hypot(c) / (end - start) as f64
    }

    fn tone(f: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * f * i as f64 / FS).sin()).collect()
    }

    #[test]
    fn dc_gain_is_one() {
        for order in 1..=6 {
            let d = ButterworthDesign::lowpass(40.0, FS, order).unwrap();
            assert!((d.magnitude(0.0, FS) - 1.0).abs() < 1e-12);
            for zp in [false, true] {
                let out = butterworth_lowpass(&series(vec![2.5; 400]), 40.0, order, zp).unwrap();
                assert!(out.values[200..].iter().all(|v| (v - 2.5).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn half_power_at_cutoff() {
        for order in [1, 2, 3, 4] {
            let d = ButterworthDesign::lowpass(40.0, FS, order).unwrap();
            assert!((d.magnitude(40.0, FS) - 0.5f64.sqrt()).abs() < 1e-12);
        }
        let out = butterworth_lowpass(&series(tone(40.0, 4000)), 40.0, 2, false).unwrap();
        let ratio = amplitude(&out.values, 40.0, 1000);
        assert!((ratio - 0.5f64.sqrt()).abs() / 0.5f64.sqrt() < 0.01, "{ratio}");
    }

    #[test]
    fn stopband_at_ten_times_cutoff() {
        let out = butterworth_lowpass(&series(tone(400.0, 4000)), 40.0, 4, false).unwrap();
        let db = 20.0 * amplitude(&out.values, 400.0, 1000).log10();
        assert!(db <= -75.0, "{db} dB");
    }

    #[test]
    fn zero_phase_preserves_symmetry() {
        let n = 801;
        let mid = (n / 2) as f64;
        let v: Vec<f64> = (0..n)
            .map(|i| 1.0 + (-((i as f64 - mid) / 20.0).powi(2)).exp())
            .collect();
        let out = butterworth_lowpass(&series(v), 40.0, 4, true).unwrap();
        for i in 0..n {
            assert!((out.values[i] - out.values[n - 1 - i]).abs() < 1e-8);
        }
        // The bump stays centred: the peak sits at the midpoint.
        let peak = out
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(peak, n / 2);
    }

    #[test]
    fn rejects_cutoff_at_nyquist() {
        let s = series(vec![0.0; 10]);
        assert!(butterworth_lowpass(&s, 500.0, 4, true).is_err());
        assert!(butterworth_lowpass(&s, 0.0, 4, true).is_err());
        assert!(butterworth_lowpass(&s, 40.0, 0, true).is_err());
    }
}
