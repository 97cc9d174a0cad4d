use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::bowen_solve;

/// Affine, orientation-preserving IFS on `[0, 1]`: `s_i(x) = r_i x + o_i`.
///
/// Maps are stored left to right (strictly increasing offsets) and their
/// images are pairwise disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ifs {
    ratios: Vec<f64>,
    offsets: Vec<f64>,
}

const SLACK: f64 = 4.0 * f64::EPSILON;

impl Ifs {
    pub fn new(ratios: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        if ratios.len() < 2 {
            return Err(Error::InvalidIfs("need at least two maps".into()));
        }
        if ratios.len() != offsets.len() {
            return Err(Error::InvalidIfs("ratios and offsets differ in length".into()));
        }
        for (&r, &o) in ratios.iter().zip(&offsets) {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidIfs(format!("ratio {r} outside (0, 1)")));
            }
            if !(o >= 0.0 && o + r <= 1.0) {
                return Err(Error::InvalidIfs(format!("image [{o}, {}] leaves [0, 1]", o + r)));
            }
        }
        for k in 1..ratios.len() {
            if offsets[k] <= offsets[k - 1] + ratios[k - 1] {
                return Err(Error::InvalidIfs(format!(
                    "images {} and {} are not strongly separated (offsets must increase and images be disjoint)",
                    k - 1,
                    k
                )));
            }
        }
        let total: f64 = ratios.iter().sum();
        if total >= 1.0 {
            return Err(Error::InvalidIfs(format!("ratio sum {total} must be < 1")));
        }
        Ok(Self { ratios, offsets })
    }

    /// Images laid out left to right with equal gaps, first at 0 and last ending at 1.
    pub fn evenly_spaced(ratios: Vec<f64>) -> Result<Self> {
        let k = ratios.len();
        if k < 2 {
            return Err(Error::InvalidIfs("need at least two maps".into()));
        }
        let total: f64 = ratios.iter().sum();
        if !(total < 1.0) {
            return Err(Error::InvalidIfs(format!("ratio sum {total} must be < 1")));
        }
        let gap = (1.0 - total) / (k - 1) as f64;
        let mut offsets = Vec::with_capacity(k);
        let mut at = 0.0;
        for (i, r) in ratios.iter().enumerate() {
            offsets.push(if i + 1 == k { 1.0 - r } else { at });
            at += r + gap;
        }
        Self::new(ratios, offsets)
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// Root of `Σ r_i^h = 1`.
    pub fn similarity_dimension(&self) -> f64 {
        bowen_solve(&self.ratios, 1e-14).expect("validated ratios always bracket a root")
    }

    /// Weights `r_i^h` of the natural measure, renormalized against rounding.
    pub fn natural_weights(&self) -> Vec<f64> {
        let h = self.similarity_dimension();
        let w: Vec<f64> = self.ratios.iter().map(|r| r.powf(h)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    /// Smallest closed interval containing the attractor.
    pub fn attractor_hull(&self) -> (f64, f64) {
        let k = self.len() - 1;
        (self.offsets[0] / (1.0 - self.ratios[0]), self.offsets[k] / (1.0 - self.ratios[k]))
    }

    /// Hull of the union of level-`depth` cylinders.
    pub fn level_hull(&self, depth: u32) -> (f64, f64) {
        let k = self.len() - 1;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..depth {
            lo = self.ratios[0] * lo + self.offsets[0];
            hi = self.ratios[k] * hi + self.offsets[k];
        }
        (lo, hi)
    }

    /// Whether `x` lies in the attractor, resolved down to cylinders of length 1e-15.
    /// Cylinder endpoints carry rounding, so membership is tested with a few ulps of slack.
    pub fn attractor_contains(&self, x: f64) -> bool {
        let (mut lo, mut len) = (0.0, 1.0);
        if !(0.0..=1.0).contains(&x) {
            return false;
        }
        while len > 1e-15 {
            let child = (0..self.len()).find(|&i| {
                let c_lo = lo + len * self.offsets[i];
                x >= c_lo - SLACK && x <= c_lo + len * self.ratios[i] + SLACK
            });
            match child {
                Some(i) => {
                    lo += len * self.offsets[i];
                    len *= self.ratios[i];
                }
                None => return false,
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_layout() {
        let ifs = Ifs::evenly_spaced(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_eq!(ifs.offsets()[0], 0.0);
        assert!((ifs.offsets()[1] - 2.0 / 3.0).abs() < 1e-15);
        let h = ifs.similarity_dimension();
        assert!((h - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert_eq!(ifs.attractor_hull(), (0.0, 1.0));
    }

    #[test]
    fn rejects_overlap_and_touching() {
        assert!(Ifs::new(vec![0.5, 0.5], vec![0.0, 0.5]).is_err());
        assert!(Ifs::new(vec![0.4, 0.4], vec![0.0, 0.3]).is_err());
        assert!(Ifs::new(vec![0.4], vec![0.0]).is_err());
        assert!(Ifs::new(vec![0.3, 0.3], vec![0.5, 0.0]).is_err());
    }

    #[test]
    fn membership() {
        let ifs = Ifs::evenly_spaced(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(ifs.attractor_contains(0.0));
        assert!(ifs.attractor_contains(1.0));
        assert!(ifs.attractor_contains(0.25)); // 0.020202..._3
        assert!(!ifs.attractor_contains(0.5));
    }
}
