//! Minimal grid covers by mass threshold.
//!
//! The grid is the half-open boxes `[k·r, (k+1)·r)` anchored at 0, with the
//! box ends computed as `k as f64 * r`. Box masses are assembled per
//! component: atoms and densities directly, power-law families by exact
//! cumulative masses once atoms are closer than `r`, block tails lumped into
//! the box at 0, and self-similar parts through their CDF on the boxes that
//! their small cylinders touch.

use serde::Serialize;

use super::{DimensionEstimate, ScalingSeries};
use crate::error::{Error, Result};
use crate::measure::{AtomFamily, GeometricBlocks, MeasureComponent, SelfSimilar, SymbolicMeasure};
use crate::par::{map_slice, Execution};

/// Occupied boxes beyond this many are refused.
const MAX_BOXES: usize = 1 << 25;

/// Relative slack on the `(1−δ)·μ(X)` target, absorbing rounding in the running sum.
const TARGET_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxMass {
    pub index: i64,
    pub mass: f64,
}

fn box_of(x: f64, r: f64) -> i64 {
    let mut k = (x / r).floor() as i64;
    while (k as f64) * r > x {
        k -= 1;
    }
    while ((k + 1) as f64) * r <= x {
        k += 1;
    }
    k
}

fn edge(k: i64, r: f64) -> f64 {
    k as f64 * r
}

struct Collector {
    r: f64,
    out: Vec<BoxMass>,
}

impl Collector {
    fn push(&mut self, index: i64, mass: f64) -> Result<()> {
        if mass > 0.0 {
            if self.out.len() >= MAX_BOXES {
                return Err(Error::Unsupported(format!("more than {MAX_BOXES} occupied boxes at r = {}", self.r)));
            }
            self.out.push(BoxMass { index, mass });
        }
        Ok(())
    }

    fn piece(&mut self, a: f64, b: f64, height: f64) -> Result<()> {
        let r = self.r;
        let (k0, k1) = (box_of(a, r), box_of(b, r));
        if (k1 - k0) as usize > MAX_BOXES {
            return Err(Error::Unsupported(format!("density spans more than {MAX_BOXES} boxes at r = {r}")));
        }
        for k in k0..=k1 {
            let lo = a.max(edge(k, r));
            let hi = b.min(edge(k + 1, r));
            if hi > lo {
                self.push(k, height * (hi - lo))?;
            }
        }
        Ok(())
    }

    fn family(&mut self, f: &AtomFamily) -> Result<()> {
        let r = self.r;
        let gap = |i: u64| f.location(i) - f.location(i + 1);
        // first index whose gap to the next atom is below r; gaps shrink with i
        let (mut lo, mut hi) = (f.first(), f.first().max(2));
        while gap(hi) >= r {
            hi = hi.saturating_mul(2);
            if hi > 1 << 52 {
                return Err(Error::Unsupported(format!("atom family too fine to resolve at r = {r}")));
            }
        }
        if gap(lo) < r {
            hi = lo;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if gap(mid) < r {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let split = hi;
        let sparse_end = f.last().map_or(split, |n| n.min(split));
        if (sparse_end - f.first()) as usize > MAX_BOXES {
            return Err(Error::Unsupported(format!("more than {MAX_BOXES} separated atoms at r = {r}")));
        }
        for i in f.first()..=sparse_end {
            self.push(box_of(f.location(i), r), f.weight(i))?;
        }
        if f.last().is_some_and(|n| n <= split) {
            return Ok(());
        }
        // atoms past `split` are packed closer than r: take box masses from the cumulative mass
        let top = f.location(split);
        let below = |y: f64| f.cdf_left(y.min(top)).value;
        let bottom = f.last().map_or(0.0, |n| f.location(n));
        let (k0, k1) = (box_of(bottom, r), box_of(top, r));
        if (k1 - k0) as usize > MAX_BOXES {
            return Err(Error::Unsupported(format!("atom family spans more than {MAX_BOXES} boxes at r = {r}")));
        }
        let mut prev = below(edge(k0, r));
        for k in k0..=k1 {
            let next = below(edge(k + 1, r));
            self.push(k, next - prev)?;
            prev = next;
        }
        Ok(())
    }

    fn blocks(&mut self, b: &GeometricBlocks) -> Result<()> {
        let mut i = b.first();
        while b.in_range(i) && b.edge(i) >= self.r {
            let (lo, hi) = b.block(i);
            if hi > lo {
                self.piece(lo, hi, b.block_mass(i) / (hi - lo))?;
            }
            i += 1;
        }
        if b.in_range(i) {
            // the remaining blocks lie in [0, a^{i²}] ⊂ [0, r)
            self.push(0, b.tail_mass(i))?;
        }
        Ok(())
    }

    fn self_similar(&mut self, s: &SelfSimilar) -> Result<()> {
        let r = self.r;
        let (ratios, offsets) = (s.ifs().ratios(), s.ifs().offsets());
        let mut candidates = Vec::new();
        let mut stack = vec![(0.0f64, 1.0f64, 0u32)];
        while let Some((lo, len, level)) = stack.pop() {
            if len < r || s.depth() == Some(level) {
                let (k0, k1) = (box_of(lo, r), box_of(lo + len, r));
                candidates.extend(k0..=k1);
            } else {
                for (ri, oi) in ratios.iter().zip(offsets) {
                    stack.push((lo + len * oi, len * ri, level + 1));
                }
            }
            if candidates.len() + stack.len() > MAX_BOXES {
                return Err(Error::Unsupported(format!("self-similar cover at r = {r} is too large")));
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let component = MeasureComponent::SelfSimilar(s.clone());
        for k in candidates {
            let m = component.cdf_left(edge(k + 1, r)).value - component.cdf_left(edge(k, r)).value;
            self.push(k, m)?;
        }
        Ok(())
    }
}

/// Masses of the occupied grid boxes of side `r`, in increasing box order.
pub fn box_masses(mu: &SymbolicMeasure, r: f64) -> Result<Vec<BoxMass>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameters(format!("box side {r} must be positive")));
    }
    let mut c = Collector { r, out: Vec::new() };
    for comp in mu.components() {
        match comp {
            MeasureComponent::Atoms(a) => {
                for &(x, w) in a.atoms() {
                    c.push(box_of(x, r), w)?;
                }
            }
            MeasureComponent::Family(f) => c.family(f)?,
            MeasureComponent::Density(d) => {
                for p in d.pieces() {
                    c.piece(p.a, p.b, p.height)?;
                }
            }
            MeasureComponent::Blocks(b) => c.blocks(b)?,
            MeasureComponent::SelfSimilar(s) => c.self_similar(s)?,
        }
    }
    let mut out = c.out;
    out.sort_by_key(|b| b.index);
    let mut merged: Vec<BoxMass> = Vec::with_capacity(out.len());
    for b in out {
        match merged.last_mut() {
            Some(last) if last.index == b.index => last.mass += b.mass,
            _ => merged.push(b),
        }
    }
    Ok(merged)
}

/// Whether δ = 0 counts are exact: atoms, atom families and densities only.
pub fn exactly_countable(mu: &SymbolicMeasure) -> bool {
    mu.components()
        .iter()
        .all(|c| matches!(c, MeasureComponent::Atoms(_) | MeasureComponent::Family(_) | MeasureComponent::Density(_)))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameters(format!("δ = {delta} must lie in [0, 1)")));
    }
    Ok(())
}

fn cover_count(masses: &[BoxMass], delta: f64) -> u64 {
    if delta == 0.0 {
        return masses.len() as u64;
    }
    let total: f64 = masses.iter().map(|b| b.mass).sum();
    let target = (1.0 - delta) * total * (1.0 - TARGET_SLACK);
    let mut sorted: Vec<f64> = masses.iter().map(|b| b.mass).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    for (n, m) in sorted.iter().enumerate() {
        if acc >= target {
            return n as u64;
        }
        acc += m;
    }
    sorted.len() as u64
}

/// Fewest grid boxes of side `r` carrying at least `(1−δ)·μ(X)`.
///
/// Boxes are disjoint, so taking them heaviest first is optimal. With `δ = 0`
/// this is the number of boxes of positive mass.
pub fn min_box_count(mu: &SymbolicMeasure, r: f64, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    Ok(cover_count(&box_masses(mu, r)?, delta))
}

/// Slope of `log N_δ(r)` against `log(1/r)` over the whole schedule, per δ.
///
/// A δ = 0 request is dropped unless [`exactly_countable`] holds.
pub fn box_dimension_estimate(
    mu: &SymbolicMeasure,
    deltas: &[f64],
    rs: &[f64],
) -> Result<Vec<(f64, DimensionEstimate)>> {
    if deltas.is_empty() || rs.is_empty() {
        return Err(Error::InvalidParameters("δ and r schedules must be nonempty".into()));
    }
    if !rs.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameters("r schedule must be strictly decreasing".into()));
    }
    for &d in deltas {
        check_delta(d)?;
    }
    let grids = map_slice(Execution::auto(), rs, |&r| box_masses(mu, r));
    let grids: Vec<Vec<BoxMass>> = grids.into_iter().collect::<Result<_>>()?;
    let window = (rs[rs.len() - 1], rs[0]);
    let mut out = Vec::new();
    for &d in deltas {
        if d == 0.0 && !exactly_countable(mu) {
            continue;
        }
        let points = rs.iter().zip(&grids).map(|(&r, g)| (r, cover_count(g, d) as f64)).collect();
        let series = ScalingSeries::new("box", points).with_delta(d);
        out.push((d, DimensionEstimate::from_fit(series, window, -1.0)?));
    }
    Ok(out)
}
