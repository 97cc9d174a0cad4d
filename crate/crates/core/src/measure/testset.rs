use std::cmp::Ordering;

use serde::Serialize;

use super::ifs::Ifs;
use crate::error::{Error, Result};

/// An interval with explicit endpoint closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// `[lo, hi)`
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: false }
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: true }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

/// A countable set too large to list, identified structurally.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Skeleton {
    /// An enumerated countable set, typically every atom location of a sequence.
    Points { label: String, points: Vec<f64> },
    /// `{ i^{-p} : i ≥ 1 }`
    PowerLattice { p: f64 },
    /// The attractor of an IFS.
    Attractor(Ifs),
}

/// Finite union of intervals and points, optionally joined with a skeleton set.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BorelTestSet {
    intervals: Vec<Interval>,
    points: Vec<f64>,
    skeleton: Option<Skeleton>,
}

impl BorelTestSet {
    pub fn new(intervals: Vec<Interval>, points: Vec<f64>, skeleton: Option<Skeleton>) -> Result<Self> {
        for iv in &intervals {
            if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo > iv.hi {
                return Err(Error::InvalidSet(format!("interval [{}, {}] has left > right", iv.lo, iv.hi)));
            }
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSet("non-finite point".into()));
        }
        let mut skeleton = skeleton;
        if let Some(Skeleton::Points { points: sk, .. }) = skeleton.as_mut() {
            sk.sort_by(f64::total_cmp);
            sk.dedup();
        }
        let mut set = Self { intervals, points, skeleton };
        set.canonicalize();
        Ok(set)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(iv: Interval) -> Self {
        Self::new(vec![iv], vec![], None).expect("single interval")
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::interval(Interval::closed(lo, hi))
    }

    pub fn points(points: Vec<f64>) -> Self {
        Self::new(vec![], points, None).expect("finite points")
    }

    pub fn skeleton(skeleton: Skeleton) -> Self {
        Self::new(vec![], vec![], Some(skeleton)).expect("skeleton only")
    }

    pub fn intervals_ref(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn points_ref(&self) -> &[f64] {
        &self.points
    }

    pub fn skeleton_ref(&self) -> Option<&Skeleton> {
        self.skeleton.as_ref()
    }

    /// Membership in the interval/point part (the skeleton is not consulted).
    pub fn contains_finite_part(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x)) || self.points.binary_search_by(|p| p.total_cmp(&x)).is_ok()
    }

    fn canonicalize(&mut self) {
        self.intervals.retain(|iv| !iv.is_empty());
        self.intervals.sort_by(|a, b| match a.lo.total_cmp(&b.lo) {
            Ordering::Equal => b.lo_closed.cmp(&a.lo_closed),
            o => o,
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(self.intervals.len());
        for iv in self.intervals.drain(..) {
            if let Some(last) = merged.last_mut() {
                let touches = iv.lo < last.hi || (iv.lo == last.hi && (last.hi_closed || iv.lo_closed));
                if touches {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    } else if iv.hi == last.hi {
                        last.hi_closed |= iv.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(iv);
        }
        let mut points = std::mem::take(&mut self.points);
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mut kept = Vec::with_capacity(points.len());
        for p in points {
            let mut absorbed = false;
            for iv in merged.iter_mut() {
                if iv.contains(p) {
                    absorbed = true;
                } else if p == iv.lo {
                    iv.lo_closed = true;
                    absorbed = true;
                } else if p == iv.hi {
                    iv.hi_closed = true;
                    absorbed = true;
                }
                if absorbed {
                    break;
                }
            }
            if !absorbed {
                kept.push(p);
            }
        }
        // closing an endpoint can make neighbours touch
        let mut again: Vec<Interval> = Vec::with_capacity(merged.len());
        for iv in merged {
            if let Some(last) = again.last_mut() {
                if iv.lo == last.hi && (last.hi_closed || iv.lo_closed) {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                    continue;
                }
            }
            again.push(iv);
        }
        self.intervals = again;
        self.points = kept;
    }
}
