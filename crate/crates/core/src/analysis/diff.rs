use super::TimeSeries;
use crate::error::{Error, Result};

/// First or second derivative by finite differences. Interior samples use the
/// symmetric three-point stencils, the ends one-sided second-order stencils.
/// A three-sample second derivative falls back to the single three-point
/// stencil at both ends.
pub fn central_difference(series: &TimeSeries, order: u8) -> Result<TimeSeries> {
    let x = &series.values;
    let n = x.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "finite differences need at least 3 samples, got {n}"
        )));
    }
    let dt = series.dt;
    let mut out = vec![0.0; n];
    match order {
        1 => {
            for i in 1..n - 1 {
                out[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
            }
            out[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
            out[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
        }
        2 => {
            let dt2 = dt * dt;
            for i in 1..n - 1 {
                out[i] = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / dt2;
            }
            if n >= 4 {
                out[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / dt2;
                out[n - 1] = (2.0 * x[n - 1] - 5.0 * x[n - 2] + 4.0 * x[n - 3] - x[n - 4]) / dt2;
            } else {
                out[0] = out[1];
                out[n - 1] = out[1];
            }
        }
        _ => {
            return Err(Error::Domain(format!(
                "derivative order must be 1 or 2, got {order}"
            )))
        }
    }
    Ok(series.with_values(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sampled(f: impl Fn(f64) -> f64, dt: f64, n: usize) -> TimeSeries {
        TimeSeries::new(0.0, dt, (0..n).map(|i| f(i as f64 * dt)).collect()).unwrap()
    }

    #[test]
    fn second_derivative_of_square_is_two() {
        let d = central_difference(&sampled(|t| t * t, 0.01, 50), 2).unwrap();
        for v in &d.values {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_has_zero_slope() {
        let d = central_difference(&sampled(|_| 3.5, 0.1, 10), 1).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_slope_is_cosine() {
        let s = sampled(f64::sin, 1e-3, 2000);
        let d = central_difference(&s, 1).unwrap();
        for i in 1..s.len() - 1 {
            assert!((d.values[i] - s.time(i).cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn ends_exact_on_quadratics() {
        let d1 = central_difference(&sampled(|t| 3.0 * t * t - t, 0.05, 6), 1).unwrap();
        assert!((d1.values[0] + 1.0).abs() < 1e-12);
        assert!((d1.values[5] - (6.0 * 0.25 - 1.0)).abs() < 1e-12);
        let d2 = central_difference(&sampled(|t| t * t, 0.5, 3), 2).unwrap();
        assert_eq!(d2.values, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_short_series_and_bad_order() {
        assert!(central_difference(&sampled(|t| t, 1.0, 2), 1).is_err());
        assert!(central_difference(&sampled(|t| t, 1.0, 5), 3).is_err());
    }

    proptest! {
        #[test]
        fn order_two_equals_order_one_twice(
            c in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let cubic = |t: f64| c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t;
            let s = sampled(cubic, 0.01, 40);
            let twice = central_difference(&central_difference(&s, 1).unwrap(), 1).unwrap();
            let direct = central_difference(&s, 2).unwrap();
            for i in 2..s.len() - 2 {
                prop_assert!((twice.values[i] - direct.values[i]).abs() < 1e-9);
            }
        }
    }
}
