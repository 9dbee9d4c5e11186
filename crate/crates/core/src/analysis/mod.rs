//! Post-processing of rig measurements: differentiation, smoothing, fitting
//! and CSV ingestion.

mod butterworth;
mod diff;
mod fit;
mod ingest;
mod savgol;

pub use butterworth::{butterworth_lowpass, ButterworthDesign};
pub use diff::central_difference;
pub use fit::{fit_unbiased_quadratic, r_squared, FitResult};
pub use ingest::{ingest_csv, parse_csv, CsvSchema, IngestedSeries, Table};
pub use savgol::{savitzky_golay, savitzky_golay_weights};

use crate::error::{Error, Result};

/// Uniformly sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Time of the first sample (s).
    pub t0: f64,
    /// Sample spacing (s).
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::Domain(format!("t0 must be finite, got {t0}")));
        }
        Ok(TimeSeries { t0, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> TimeSeries {
        TimeSeries {
            t0: self.t0,
            dt: self.dt,
            values,
        }
    }
}

/// Smoothing stage of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoother {
    None,
    SavitzkyGolay { window: usize, poly_order: usize },
    Butterworth { cutoff_hz: f64, order: usize, zero_phase: bool },
}

impl Smoother {
    pub fn apply(&self, series: &TimeSeries) -> Result<TimeSeries> {
        match *self {
            Smoother::None => Ok(series.clone()),
            Smoother::SavitzkyGolay { window, poly_order } => savitzky_golay(series, window, poly_order),
            Smoother::Butterworth {
                cutoff_hz,
                order,
                zero_phase,
            } => butterworth_lowpass(series, cutoff_hz, order, zero_phase),
        }
    }
}

/// Smooth position, differentiate, smooth acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pipeline {
    pub position: Smoother,
    pub acceleration: Smoother,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            position: Smoother::SavitzkyGolay {
                window: 21,
                poly_order: 3,
            },
            acceleration: Smoother::Butterworth {
                cutoff_hz: 40.0,
                order: 4,
                zero_phase: true,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub position: TimeSeries,
    pub velocity: TimeSeries,
    pub raw_acceleration: TimeSeries,
    pub acceleration: TimeSeries,
}

impl Pipeline {
    pub fn run(&self, position: &TimeSeries) -> Result<PipelineOutput> {
        let smoothed = self.position.apply(position)?;
        let velocity = central_difference(&smoothed, 1)?;
        let raw_acceleration = central_difference(&smoothed, 2)?;
        let acceleration = self.acceleration.apply(&raw_acceleration)?;
        Ok(PipelineOutput {
            position: smoothed,
            velocity,
            raw_acceleration,
            acceleration,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_series_rejects_bad_dt() {
        assert!(TimeSeries::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(TimeSeries::new(0.0, f64::NAN, vec![1.0]).is_err());
        let s = TimeSeries::new(1.0, 0.5, vec![0.0; 3]).unwrap();
        assert_eq!(s.times(), vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn pipeline_recovers_gravity_from_parabola() {
        let dt = 1e-3;
        let values: Vec<f64> = (0..500)
            .map(|i| {
                let t = i as f64 * dt;
                1.0 - 0.5 * 9.81 * t * t
            })
            .collect();
        let out = Pipeline::default()
            .run(&TimeSeries::new(0.0, dt, values).unwrap())
            .unwrap();
        for a in &out.acceleration.values {
            assert!((a + 9.81).abs() < 1e-6, "{a}");
        }
        assert!((out.velocity.values[100] + 9.81 * 0.1).abs() < 1e-9);
    }
}
