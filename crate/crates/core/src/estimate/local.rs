use serde::Serialize;

use super::{default_window, DimensionEstimate, ScalingSeries};
use crate::error::{Error, Result};
use crate::measure::SymbolicMeasure;
use crate::par::{map_slice, Execution};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalProfile {
    /// One estimate per requested quantile of the local exponent.
    pub estimates: Vec<(f64, DimensionEstimate)>,
    /// Samples dropped because some ball around them had zero mass.
    pub excluded: usize,
}

/// Quantiles of the local exponents `α(x, r) = log μ(B(x,r)) / log r`.
///
/// For fixed `r` the exponent decreases in the ball mass, so the `q`-quantile
/// of `α` sits at the `(1−q)`-quantile of the masses. That mass is tracked
/// across scales and its log–log slope is reported; quantile 0.01 stands in
/// for the essential infimum of the local dimension, 0.99 for the supremum.
pub fn local_dimension_profile(
    mu: &SymbolicMeasure,
    samples: &[f64],
    rs: &[f64],
    quantiles: &[f64],
    window: Option<(f64, f64)>,
) -> Result<LocalProfile> {
    if rs.len() < 3 || !rs.windows(2).all(|w| w[1] < w[0]) || rs[rs.len() - 1] <= 0.0 {
        return Err(Error::InvalidParameters("need at least three positive, strictly decreasing scales".into()));
    }
    if let Some(q) = quantiles.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidParameters(format!("quantile {q} outside [0, 1]")));
    }
    let rows = map_slice(Execution::auto(), samples, |&x| rs.iter().map(|&r| mu.ball_mass(x, r)).collect::<Vec<_>>());
    let kept: Vec<Vec<f64>> = rows.into_iter().filter(|row| row.iter().all(|&m| m > 0.0)).collect();
    let excluded = samples.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::DegenerateBall);
    }
    let columns: Vec<Vec<f64>> = (0..rs.len())
        .map(|j| {
            let mut col: Vec<f64> = kept.iter().map(|row| row[j]).collect();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();
    let window = window.unwrap_or_else(|| default_window(rs));
    let last = (kept.len() - 1) as f64;
    let estimates = quantiles
        .iter()
        .map(|&q| {
            let at = ((1.0 - q) * last).floor() as usize;
            let points = rs.iter().zip(&columns).map(|(&r, col)| (r, col[at])).collect();
            let series = ScalingSeries::new(format!("local q={q}"), points).with_samples(kept.len());
            Ok((q, DimensionEstimate::from_fit(series, window, 1.0)?))
        })
        .collect::<Result<_>>()?;
    Ok(LocalProfile { estimates, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::log_schedule;
    use crate::measure::Ifs;
    use crate::mix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform() {
        let mu = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap();
        let xs = mu.sample(4000, 1).unwrap();
        let rs = log_schedule(1e-1, 1e-5, 24).unwrap();
        let p = local_dimension_profile(&mu, &xs, &rs, &[0.01, 0.99], None).unwrap();
        assert_eq!(p.excluded, 0);
        for (_, e) in &p.estimates {
            assert_abs_diff_eq!(e.slope, 1.0, epsilon = 0.05);
        }
    }

    #[test]
    fn atom_plus_slab() {
        let mu =
            mix(&[0.9, 0.1], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(1.0, 2.0).unwrap()]).unwrap();
        let xs = mu.sample(4000, 3).unwrap();
        let rs = log_schedule(1e-1, 1e-5, 24).unwrap();
        let p = local_dimension_profile(&mu, &xs, &rs, &[0.01, 0.99], None).unwrap();
        assert_abs_diff_eq!(p.estimates[0].1.slope, 0.0, epsilon = 0.05);
        assert_abs_diff_eq!(p.estimates[1].1.slope, 1.0, epsilon = 0.05);
    }

    #[test]
    fn cantor() {
        let mu = SymbolicMeasure::natural_self_similar(Ifs::new(vec![1.0 / 3.0; 2], vec![0.0, 2.0 / 3.0]).unwrap());
        let xs = mu.sample(2000, 5).unwrap();
        let rs = log_schedule(1e-1, 1e-7, 24).unwrap();
        let p = local_dimension_profile(&mu, &xs, &rs, &[0.01, 0.99], None).unwrap();
        for (q, e) in &p.estimates {
            assert_abs_diff_eq!(e.slope, 2f64.ln() / 3f64.ln(), epsilon = 0.05);
            assert!(e.stderr < 0.05, "q = {q}: {e:?}");
        }
    }

    #[test]
    fn degenerate_balls() {
        let mu = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap();
        let rs = [0.1, 0.01, 0.001];
        let p = local_dimension_profile(&mu, &[0.5, 3.0], &rs, &[0.5], None).unwrap();
        assert_eq!(p.excluded, 1);
        assert_eq!(local_dimension_profile(&mu, &[3.0], &rs, &[0.5], None), Err(Error::DegenerateBall));
    }
}
