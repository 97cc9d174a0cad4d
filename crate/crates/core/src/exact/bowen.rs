use crate::error::{Error, Result};

/// Root `h` of `Σ r_i^h = 1`, by bisection on `[0, 1]`.
///
/// `h ↦ Σ r_i^h` is strictly decreasing, equals `k ≥ 2` at 0 and `Σ r_i ≤ 1` at 1,
/// so the root is bracketed.
pub fn bowen_solve(ratios: &[f64], tol: f64) -> Result<f64> {
    if ratios.len() < 2 {
        return Err(Error::InvalidRatios("need at least two ratios".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::InvalidRatios(format!("ratio {r} outside (0, 1)")));
    }
    let sum: f64 = ratios.iter().sum();
    if sum > 1.0 + 1e-15 {
        return Err(Error::InvalidRatios(format!("ratio sum {sum} exceeds 1")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameters(format!("tolerance {tol} must be positive")));
    }
    let pressure = |h: f64| ratios.iter().map(|r| r.powf(h)).sum::<f64>() - 1.0;
    if pressure(1.0) >= 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = pressure(mid);
        if v.abs() < tol * 0.5 || hi - lo <= f64::EPSILON {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoRoot)
}
