use serde::Serialize;

use super::ScalingSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub stderr: f64,
    pub used: usize,
}

/// Relative slack when deciding whether a scale sits on a window edge.
const EDGE_SLACK: f64 = 1e-12;

/// Least squares of `log value` on `log r` over the points with `r` in `window`.
///
/// Logs are taken relative to the first point in the window, so a constant
/// series has exactly zero slope.
pub fn loglog_fit(series: &ScalingSeries, window: (f64, f64)) -> Result<Fit> {
    let (lo, hi) = (window.0 * (1.0 - EDGE_SLACK), window.1 * (1.0 + EDGE_SLACK));
    let inside: Vec<(f64, f64)> = series.points.iter().copied().filter(|&(r, _)| r >= lo && r <= hi).collect();
    if let Some(&(r, value)) = inside.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::NonPositiveValue { r, value });
    }
    let n = inside.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let (x0, y0) = (inside[0].0.ln(), inside[0].1.ln());
    let xs: Vec<f64> = inside.iter().map(|p| p.0.ln() - x0).collect();
    let ys: Vec<f64> = inside.iter().map(|p| p.1.ln() - y0).collect();
    let nf = n as f64;
    let xm = xs.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
    }
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameters("fit window holds a single distinct scale".into()));
    }
    let slope = sxy / sxx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - ym - slope * (x - xm);
            e * e
        })
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(Fit { slope, stderr, used: n })
}

/// `steps` log-spaced scales from `r_max` down to `r_min`, both included.
pub fn log_schedule(r_max: f64, r_min: f64, steps: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || steps < 2 {
        return Err(Error::InvalidParameters(format!(
            "need 0 < r_min < r_max and at least two steps (got {r_min}, {r_max}, {steps})"
        )));
    }
    let (a, b) = (r_max.ln(), r_min.ln());
    let last = (steps - 1) as f64;
    let mut out: Vec<f64> = (0..steps).map(|k| (a + (b - a) * k as f64 / last).exp()).collect();
    out[0] = r_max;
    out[steps - 1] = r_min;
    Ok(out)
}

/// Window dropping the largest and smallest quarter of the scales.
pub fn default_window(rs: &[f64]) -> (f64, f64) {
    let n = rs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut sorted = rs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let cut = n / 4;
    let kept = &sorted[cut..n - cut];
    (kept[kept.len() - 1], kept[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(mut f: impl FnMut(f64) -> f64, rs: &[f64]) -> ScalingSeries {
        ScalingSeries::new("test", rs.iter().map(|&r| (r, f(r))).collect())
    }

    #[test]
    fn exact_line() {
        let rs = log_schedule(1.0, 1e-6, 24).unwrap();
        let fit = loglog_fit(&series(|r| r, &rs), (1e-6, 1.0)).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-12);
        assert!(fit.stderr < 1e-12);
        assert_eq!(fit.used, 24);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let rs = log_schedule(0.5, 1e-5, 17).unwrap();
        for c in [0.3, 1.0, 1e-7, 0.1 + 0.2] {
            let fit = loglog_fit(&series(|_| c, &rs), default_window(&rs)).unwrap();
            assert_eq!(fit.slope, 0.0);
            assert_eq!(fit.stderr, 0.0);
        }
    }

    #[test]
    fn noisy_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rs = log_schedule(0.1, 1e-4, 24).unwrap();
        let s = series(|r| r * r * (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0)), &rs);
        let fit = loglog_fit(&s, default_window(&rs)).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 0.05);
        assert!(fit.stderr > 0.0 && fit.stderr < 0.05);
    }

    #[test]
    fn errors() {
        let rs = [1.0, 0.5, 0.25];
        assert_eq!(loglog_fit(&series(|r| r, &rs), (0.4, 1.0)), Err(Error::TooFewPoints(2)));
        let e = loglog_fit(&series(|r| if r < 0.3 { 0.0 } else { r }, &rs), (0.1, 1.0));
        assert_eq!(e, Err(Error::NonPositiveValue { r: 0.25, value: 0.0 }));
    }

    #[test]
    fn window_edges_are_inclusive() {
        let rs = log_schedule(1e-1, 1e-4, 4).unwrap();
        let fit = loglog_fit(&series(|r| r, &rs), (1e-4, 1e-1)).unwrap();
        assert_eq!(fit.used, 4);
    }

    #[test]
    fn schedule_and_window() {
        let rs = log_schedule(1.0, 1e-4, 24).unwrap();
        assert_eq!(rs.len(), 24);
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
        let (lo, hi) = default_window(&rs);
        assert_eq!(hi, rs[6]);
        assert_eq!(lo, rs[17]);
        assert!(log_schedule(1.0, 2.0, 5).is_err());
        assert!(log_schedule(1.0, 0.5, 1).is_err());
    }

    proptest! {
        #[test]
        fn recovers_power_laws(k in -3.0f64..3.0, c in 1e-3f64..1e3) {
            let rs = log_schedule(1.0, 1e-3, 10).unwrap();
            let fit = loglog_fit(&series(|r| c * r.powf(k), &rs), (1e-3, 1.0)).unwrap();
            prop_assert!((fit.slope - k).abs() < 1e-9);
        }
    }
}
