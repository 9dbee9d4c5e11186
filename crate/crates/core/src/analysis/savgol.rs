use nalgebra::{DMatrix, DVector};

use super::TimeSeries;
use crate::error::{Error, Result};

/// Least-squares weights that evaluate a degree-`poly_order` fit over
/// `len` consecutive samples at sample index `at` within the window.
pub fn savitzky_golay_weights(len: usize, poly_order: usize, at: usize) -> Result<Vec<f64>> {
    if len <= poly_order || at >= len {
        return Err(Error::Domain(format!(
            "need window length > poly_order and 0 <= at < len, got len {len}, order {poly_order}, at {at}"
        )));
    }
    // Scaled abscissae keep the normal matrix well conditioned.
    let scale = ((len - 1) as f64 / 2.0).max(1.0);
    let a = DMatrix::from_fn(len, poly_order + 1, |j, k| {
        ((j as f64 - at as f64) / scale).powi(k as i32)
    });
    let mut e0 = DVector::zeros(poly_order + 1);
    e0[0] = 1.0;
    let ata = a.transpose() * &a;
    let z = match ata.clone().cholesky() {
        Some(ch) => ch.solve(&e0),
        None => ata
            .svd(true, true)
            .solve(&e0, 1e-12)
            .map_err(|e| Error::Rank(e.to_string()))?,
    };
    Ok((a * z).iter().copied().collect())
}

/// Savitzky-Golay smoothing. Samples closer than half a window to either end
/// are fitted on the truncated window that fits in the series, widened to
/// `poly_order + 1` samples when the truncation leaves too few.
pub fn savitzky_golay(series: &TimeSeries, window: usize, poly_order: usize) -> Result<TimeSeries> {
    if window.is_multiple_of(2) || window <= poly_order {
        return Err(Error::Domain(format!(
            "window must be odd and greater than poly_order, got window {window}, order {poly_order}"
        )));
    }
    let x = &series.values;
    let n = x.len();
    if n < window {
        return Err(Error::Domain(format!(
            "series of {n} samples is shorter than the window {window}"
        )));
    }
    let half = window / 2;
    let centre = savitzky_golay_weights(window, poly_order, half)?;
    let mut out = vec![0.0; n];
    for i in half..n - half {
        out[i] = dot(&centre, &x[i - half..=i + half]);
    }
    let min_len = poly_order + 1;
    for i in (0..half).chain(n - half..n) {
        let mut lo = i.saturating_sub(half);
        let mut hi = (i + half).min(n - 1);
        while hi - lo + 1 < min_len {
            if lo == 0 {
                hi += 1;
            } else {
                lo -= 1;
            }
        }
        let w = savitzky_golay_weights(hi - lo + 1, poly_order, i - lo)?;
        out[i] = dot(&w, &x[lo..=hi]);
    }
    Ok(series.with_values(out))
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(0.0, 0.01, values).unwrap()
    }

    #[test]
    fn known_five_point_quadratic_kernel() {
        let w = savitzky_golay_weights(5, 2, 2).unwrap();
        let expected = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|v| v / 35.0);
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn reproduces_cubic() {
        let v: Vec<f64> = (0..60)
            .map(|i| {
                let t = i as f64 * 0.1;
                0.3 * t * t * t - t * t + 2.0 * t - 5.0
            })
            .collect();
        let out = savitzky_golay(&series(v.clone()), 11, 3).unwrap();
        for (a, b) in out.values.iter().zip(&v) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_unchanged() {
        let out = savitzky_golay(&series(vec![4.25; 30]), 7, 0).unwrap();
        assert!(out.values.iter().all(|v| (v - 4.25).abs() < 1e-13));
    }

    #[test]
    fn white_noise_variance_gain() {
        let mut rng = StdRng::seed_from_u64(7);
        let v: Vec<f64> = (0..100_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let var = |x: &[f64]| {
            let m = x.iter().sum::<f64>() / x.len() as f64;
            x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
        };
        let out = savitzky_golay(&series(v.clone()), 11, 3).unwrap();
        let gain: f64 = savitzky_golay_weights(11, 3, 5).unwrap().iter().map(|w| w * w).sum();
        let ratio = var(&out.values[5..out.len() - 5]) / var(&v);
        assert!((ratio / gain - 1.0).abs() < 0.1, "ratio {ratio} gain {gain}");
    }

    #[test]
    fn invalid_parameters() {
        let s = series(vec![0.0; 20]);
        assert!(savitzky_golay(&s, 10, 3).is_err());
        assert!(savitzky_golay(&s, 3, 3).is_err());
        assert!(savitzky_golay(&series(vec![0.0; 5]), 7, 2).is_err());
    }

    proptest! {
        #[test]
        fn polynomial_reproduction_including_edges(
            c in proptest::collection::vec(-3.0f64..3.0, 5),
            half in 1usize..8,
            order in 0usize..5,
        ) {
            let window = 2 * half + 1;
            prop_assume!(window > order);
            let v: Vec<f64> = (0..40)
                .map(|i| {
                    let t = i as f64 / 40.0;
                    (0..=order).map(|k| c[k] * t.powi(k as i32)).sum()
                })
                .collect();
            let out = savitzky_golay(&series(v.clone()), window, order).unwrap();
            for (a, b) in out.values.iter().zip(&v) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
