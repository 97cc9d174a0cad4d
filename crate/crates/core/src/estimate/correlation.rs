//! Grassberger–Procaccia correlation sums with exact integer pair counts.

use serde::Serialize;

use super::{default_window, DimensionEstimate, ScalingSeries};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};

/// Default cap on the number of samples fed to the pair counters.
pub const MAX_SAMPLES: usize = 100_000;

const CHUNK: usize = 512;

/// Points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameters(format!(
                "{} coordinates do not split into {dim}-vectors",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameters("coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

impl From<Vec<f64>> for PointCloud {
    fn from(xs: Vec<f64>) -> Self {
        Self { dim: 1, coords: xs }
    }
}

impl From<&[f64]> for PointCloud {
    fn from(xs: &[f64]) -> Self {
        Self { dim: 1, coords: xs.to_vec() }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Indices sorted by first coordinate, ties by index.
fn order(points: &PointCloud) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points.point(i)[0].total_cmp(&points.point(j)[0]).then(i.cmp(&j)));
    idx
}

fn check(points: &PointCloud, rs: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidParameters("need at least two samples".into()));
    }
    if points.len() > MAX_SAMPLES {
        return Err(Error::InvalidParameters(format!("{} samples exceed the cap of {MAX_SAMPLES}", points.len())));
    }
    if rs.is_empty() || !rs.windows(2).all(|w| w[1] < w[0]) || !(rs[rs.len() - 1] > 0.0) {
        return Err(Error::InvalidParameters("scales must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// Number of scales (a prefix of the decreasing schedule) that are `≥ d`.
fn reach(rs: &[f64], d: f64) -> usize {
    rs.partition_point(|&r| r >= d)
}

/// `#{i < j : dist(x_i, x_j) ≤ r}` for every `r` in the decreasing schedule `rs`.
pub fn pair_counts(points: &PointCloud, rs: &[f64], exec: Execution) -> Result<Vec<u64>> {
    check(points, rs)?;
    let n = points.len();
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Vec<u64>> = if points.dim() == 1 {
        let mut xs: Vec<f64> = points.coords.clone();
        xs.sort_by(f64::total_cmp);
        map_range(exec, 0..chunks, |c| {
            let mut acc = vec![0u64; rs.len()];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let x = xs[i];
                let rest = &xs[i + 1..];
                for (k, &r) in rs.iter().enumerate() {
                    acc[k] += rest.partition_point(|&y| y - x <= r) as u64;
                }
            }
            acc
        })
    } else {
        let idx = order(points);
        let r_max = rs[0];
        map_range(exec, 0..chunks, |c| {
            // tally[p] counts pairs within exactly the first p scales
            let mut tally = vec![0u64; rs.len() + 1];
            for a in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let p = points.point(idx[a]);
                for &j in &idx[a + 1..] {
                    let q = points.point(j);
                    if q[0] - p[0] > r_max {
                        break;
                    }
                    tally[reach(rs, distance(p, q))] += 1;
                }
            }
            let mut acc = vec![0u64; rs.len()];
            let mut run = 0;
            for k in (0..rs.len()).rev() {
                run += tally[k + 1];
                acc[k] = run;
            }
            acc
        })
    };
    let mut total = vec![0u64; rs.len()];
    for part in partial {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

/// `counts[i][k] = #{j ≠ i : dist(x_i, x_j) ≤ rs[k]}`, in the input order of the points.
pub fn neighbour_counts(points: &PointCloud, rs: &[f64], exec: Execution) -> Result<Vec<Vec<u32>>> {
    check(points, rs)?;
    let n = points.len();
    if points.dim() == 1 {
        let idx = order(points);
        let xs: Vec<f64> = idx.iter().map(|&i| points.coords[i]).collect();
        let sorted_rows = map_range(exec, 0..n, |a| {
            let x = xs[a];
            rs.iter()
                .map(|&r| {
                    let left = xs.partition_point(|&y| x - y > r);
                    let right = xs.partition_point(|&y| y - x <= r);
                    (right - left - 1) as u32
                })
                .collect::<Vec<u32>>()
        });
        let mut rows = vec![Vec::new(); n];
        for (a, row) in sorted_rows.into_iter().enumerate() {
            rows[idx[a]] = row;
        }
        return Ok(rows);
    }
    let idx = order(points);
    let mut pos = vec![0; n];
    for (a, &i) in idx.iter().enumerate() {
        pos[i] = a;
    }
    let r_max = rs[0];
    Ok(map_range(exec, 0..n, |i| {
        let p = points.point(i);
        let mut tally = vec![0u32; rs.len() + 1];
        let a = pos[i];
        for &j in idx[a + 1..].iter() {
            let q = points.point(j);
            if q[0] - p[0] > r_max {
                break;
            }
            tally[reach(rs, distance(p, q))] += 1;
        }
        for &j in idx[..a].iter().rev() {
            let q = points.point(j);
            if p[0] - q[0] > r_max {
                break;
            }
            tally[reach(rs, distance(p, q))] += 1;
        }
        let mut row = vec![0u32; rs.len()];
        let mut run = 0;
        for k in (0..rs.len()).rev() {
            run += tally[k + 1];
            row[k] = run;
        }
        row
    }))
}

/// `C_N(r) = 2·#{i < j : dist ≤ r} / (N(N−1))` across the schedule.
pub fn correlation_sums(points: &PointCloud, rs: &[f64], exec: Execution) -> Result<Vec<f64>> {
    let counts = pair_counts(points, rs, exec)?;
    let n = points.len() as f64;
    let pairs = n * (n - 1.0) / 2.0;
    Ok(counts.into_iter().map(|c| c as f64 / pairs).collect())
}

fn fit_positive(
    method: &str,
    rs: &[f64],
    values: &[f64],
    window: (f64, f64),
    samples: usize,
) -> Result<DimensionEstimate> {
    let in_window = |r: f64| r >= window.0 * (1.0 - 1e-12) && r <= window.1 * (1.0 + 1e-12);
    if rs.iter().zip(values).all(|(&r, &v)| !in_window(r) || v == 0.0) {
        return Err(Error::EmptyCorrelation);
    }
    let points: Vec<(f64, f64)> = rs.iter().copied().zip(values.iter().copied()).filter(|p| p.1 > 0.0).collect();
    let series = ScalingSeries::new(method, points).with_samples(samples);
    DimensionEstimate::from_fit(series, window, 1.0)
}

/// Correlation dimension as the slope of `log C_N(r)` on `log r` over `window`.
///
/// Scales where no pair is close enough are left out of the fit; the default
/// window drops the largest and smallest quarter of the schedule.
pub fn correlation_dim_gp(
    points: &PointCloud,
    rs: &[f64],
    window: Option<(f64, f64)>,
    exec: Execution,
) -> Result<DimensionEstimate> {
    let values = correlation_sums(points, rs, exec)?;
    fit_positive("gp", rs, &values, window.unwrap_or_else(|| default_window(rs)), points.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedCorrelation {
    pub estimate: DimensionEstimate,
    pub delta: f64,
    /// Scale at which ball masses were ranked.
    pub median_scale: f64,
    /// Indices of the discarded samples, heaviest ball first.
    pub dropped: Vec<usize>,
}

/// Correlation slope after discarding the `⌊δN⌋` samples with the heaviest
/// empirical balls at the median window scale.
///
/// The restricted sum is `Σ_{i∈A} #{j ≠ i : dist ≤ r} / (|A|(N−1))`: centres
/// range over the kept set `A`, neighbours over all samples. Ties in ball
/// mass are broken by sample index.
pub fn modified_correlation_dim(
    points: &PointCloud,
    delta: f64,
    rs: &[f64],
    window: Option<(f64, f64)>,
    exec: Execution,
) -> Result<ModifiedCorrelation> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameters(format!("δ = {delta} must lie in (0, 1)")));
    }
    let counts = neighbour_counts(points, rs, exec)?;
    let window = window.unwrap_or_else(|| default_window(rs));
    let inside: Vec<usize> =
        (0..rs.len()).filter(|&k| rs[k] >= window.0 * (1.0 - 1e-12) && rs[k] <= window.1 * (1.0 + 1e-12)).collect();
    if inside.is_empty() {
        return Err(Error::TooFewPoints(0));
    }
    let k_med = inside[inside.len() / 2];
    let n = points.len();
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&i, &j| counts[j][k_med].cmp(&counts[i][k_med]).then(i.cmp(&j)));
    let n_drop = ((delta * n as f64).floor() as usize).min(n - 1);
    let dropped: Vec<usize> = ranked[..n_drop].to_vec();
    let mut keep = vec![true; n];
    for &i in &dropped {
        keep[i] = false;
    }
    let kept = (n - n_drop) as f64;
    let values: Vec<f64> = (0..rs.len())
        .map(|k| {
            let s: u64 = (0..n).filter(|&i| keep[i]).map(|i| counts[i][k] as u64).sum();
            s as f64 / (kept * (n as f64 - 1.0))
        })
        .collect();
    let mut estimate = fit_positive("mc", rs, &values, window, n)?;
    estimate.series.delta = Some(delta);
    Ok(ModifiedCorrelation { estimate, delta, median_scale: rs[k_med], dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::log_schedule;
    use crate::measure::{Ifs, SymbolicMeasure};
    use crate::mix;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn brute_pairs(points: &PointCloud, rs: &[f64]) -> Vec<u64> {
        let n = points.len();
        rs.iter()
            .map(|&r| {
                let mut c = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        let (a, b) = (points.point(i), points.point(j));
                        let d = if a.len() == 1 {
                            // larger minus smaller, as the sorted scan computes it
                            a[0].max(b[0]) - a[0].min(b[0])
                        } else {
                            distance(a, b)
                        };
                        c += (d <= r) as u64;
                    }
                }
                c
            })
            .collect()
    }

    #[test]
    fn uniform_slope() {
        let xs = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap().sample(10_000, 42).unwrap();
        let rs = log_schedule(1.0, 1e-4, 24).unwrap();
        let est = correlation_dim_gp(&xs.into(), &rs, Some((1e-2, 1e-1)), Execution::auto()).unwrap();
        assert_abs_diff_eq!(est.slope, 1.0, epsilon = 0.05);
    }

    #[test]
    fn cantor_slope() {
        let mu = SymbolicMeasure::natural_self_similar(Ifs::new(vec![1.0 / 3.0; 2], vec![0.0, 2.0 / 3.0]).unwrap());
        let xs = mu.sample(10_000, 42).unwrap();
        let rs = log_schedule(1e-1, 1e-5, 24).unwrap();
        let est = correlation_dim_gp(&xs.into(), &rs, None, Execution::auto()).unwrap();
        assert_abs_diff_eq!(est.slope, 2f64.ln() / 3f64.ln(), epsilon = 0.05);
    }

    #[test]
    fn atoms_give_flat_sums() {
        let xs = vec![0.0; 500];
        let rs = log_schedule(1.0, 1e-6, 24).unwrap();
        let est = correlation_dim_gp(&xs.into(), &rs, None, Execution::auto()).unwrap();
        assert_eq!(est.slope, 0.0);
        assert!(est.series.points.iter().all(|p| p.1 == 1.0));

        let mu = SymbolicMeasure::atoms(vec![(0.0, 0.2), (0.5, 0.5), (1.0, 0.3)]).unwrap();
        let xs = mu.sample(2000, 9).unwrap();
        let rs = log_schedule(0.4, 1e-6, 24).unwrap();
        let est = correlation_dim_gp(&xs.into(), &rs, Some((1e-6, 0.4)), Execution::auto()).unwrap();
        assert_eq!(est.slope, 0.0);
    }

    #[test]
    fn empty_window() {
        let xs = vec![0.0, 1.0, 2.0];
        let rs = log_schedule(0.5, 1e-3, 8).unwrap();
        assert_eq!(correlation_dim_gp(&xs.into(), &rs, None, Execution::Serial), Err(Error::EmptyCorrelation));
        assert!(correlation_dim_gp(&vec![1.0].into(), &rs, None, Execution::Serial).is_err());
    }

    #[test]
    fn planar_pairs() {
        let mu = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap();
        let xs = mu.sample(600, 1).unwrap();
        let ys = mu.sample(600, 2).unwrap();
        let coords: Vec<f64> = xs.iter().zip(&ys).flat_map(|(x, y)| [*x, *y]).collect();
        let pc = PointCloud::new(2, coords).unwrap();
        let rs = log_schedule(1.5, 1e-3, 12).unwrap();
        assert_eq!(pair_counts(&pc, &rs, Execution::Parallel).unwrap(), brute_pairs(&pc, &rs));
        let rows = neighbour_counts(&pc, &rs, Execution::Parallel).unwrap();
        let pairs = pair_counts(&pc, &rs, Execution::Serial).unwrap();
        for k in 0..rs.len() {
            assert_eq!(rows.iter().map(|r| r[k] as u64).sum::<u64>(), 2 * pairs[k]);
        }
        assert_eq!(pairs[0], 600 * 599 / 2);

        let xs = mu.sample(3000, 3).unwrap();
        let ys = mu.sample(3000, 4).unwrap();
        let coords: Vec<f64> = xs.iter().zip(&ys).flat_map(|(x, y)| [*x, *y]).collect();
        let est = correlation_dim_gp(
            &PointCloud::new(2, coords).unwrap(),
            &log_schedule(0.2, 0.01, 12).unwrap(),
            None,
            Execution::auto(),
        )
        .unwrap();
        assert_abs_diff_eq!(est.slope, 2.0, epsilon = 0.1);
    }

    #[test]
    fn modified_dimension_on_atom_and_slab() {
        let mu =
            mix(&[0.1, 1.0], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(0.1, 1.0).unwrap()]).unwrap();
        let pc: PointCloud = mu.sample(10_000, 42).unwrap().into();
        let rs = log_schedule(1e-2, 1e-6, 24).unwrap();
        let window = Some((1e-6, 1e-4));
        let keep = modified_correlation_dim(&pc, 0.01, &rs, window, Execution::auto()).unwrap();
        assert_abs_diff_eq!(keep.estimate.slope, 0.0, epsilon = 0.05);
        assert_eq!(keep.dropped.len(), 100);
        assert!(keep.dropped.iter().all(|&i| pc.point(i)[0] == 0.0));

        let rs = log_schedule(1e-1, 1e-4, 24).unwrap();
        let drop = modified_correlation_dim(&pc, 0.2, &rs, None, Execution::auto()).unwrap();
        assert_abs_diff_eq!(drop.estimate.slope, 1.0, epsilon = 0.05);
        assert_eq!(drop.estimate.series.delta, Some(0.2));

        let uni: PointCloud = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap().sample(10_000, 42).unwrap().into();
        for delta in [0.01, 0.05, 0.1] {
            let e = modified_correlation_dim(&uni, delta, &rs, None, Execution::auto()).unwrap();
            assert_abs_diff_eq!(e.estimate.slope, 1.0, epsilon = 0.05);
        }
    }

    #[test]
    fn execution_does_not_matter() {
        let xs: PointCloud = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap().sample(5000, 8).unwrap().into();
        let rs = log_schedule(1.0, 1e-4, 24).unwrap();
        let a = correlation_dim_gp(&xs, &rs, None, Execution::Serial).unwrap();
        let b = correlation_dim_gp(&xs, &rs, None, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let a = modified_correlation_dim(&xs, 0.05, &rs, None, Execution::Serial).unwrap();
        let b = modified_correlation_dim(&xs, 0.05, &rs, None, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn line_counts_match_brute_force(xs in prop::collection::vec(-2.0f64..2.0, 2..120), dup in 0usize..5) {
            let mut xs = xs;
            for k in 0..dup.min(xs.len() - 1) {
                xs[k + 1] = xs[0];
            }
            let pc: PointCloud = xs.into();
            let rs = log_schedule(4.0, 1e-3, 10).unwrap();
            let counts = pair_counts(&pc, &rs, Execution::Parallel).unwrap();
            prop_assert_eq!(&counts, &brute_pairs(&pc, &rs));
            let rows = neighbour_counts(&pc, &rs, Execution::Parallel).unwrap();
            for k in 0..rs.len() {
                prop_assert_eq!(rows.iter().map(|r| r[k] as u64).sum::<u64>(), 2 * counts[k]);
            }
            prop_assert!(counts.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
