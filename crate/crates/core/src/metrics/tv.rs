//! Total variation and absolute continuity on the symbolic class.
//!
//! The signed difference `μ − ν` is split by type. Atoms are compared location
//! by location (power-law families index by index with a closed-form tail),
//! block sequences block by block, invariant self-similar measures by shape
//! (distinct shapes are mutually singular), and the remaining densities by a
//! sweep over their breakpoints. The parts live on disjoint supports, so the
//! positive and negative masses add up.

use std::collections::BTreeMap;

use crate::certified::{power_tail, Certified};
use crate::error::{Error, Result};
use crate::measure::{AtomFamily, GeometricBlocks, MeasureComponent, SelfSimilar, SymbolicMeasure};

const EPS: f64 = f64::EPSILON;
/// Most atoms or blocks enumerated individually.
const ENUM_LIMIT: u64 = 20_000_000;
/// Most cylinders expanded when approximants must be swept.
const CYLINDER_LIMIT: usize = 1 << 20;

/// Positive and negative part masses of a signed difference.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SignedParts {
    pub positive: Certified,
    pub negative: Certified,
}

impl SignedParts {
    fn add(&mut self, v: f64, err: f64) {
        if v >= 0.0 {
            self.positive += Certified::new(v, err);
        } else {
            self.negative += Certified::new(-v, err);
        }
    }

    /// `sup_A |μ(A) − ν(A)|`
    pub fn sup(&self) -> Certified {
        if self.positive.value >= self.negative.value {
            Certified::new(self.positive.value, self.positive.error.max(self.negative.error))
        } else {
            Certified::new(self.negative.value, self.positive.error.max(self.negative.error))
        }
    }

    /// `|μ − ν|(X)`
    pub fn total(&self) -> Certified {
        self.positive + self.negative
    }
}

/// `sup_A |μ(A) − ν(A)|` (no factor 1/2).
pub fn tv_distance(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<f64> {
    Ok(tv_distance_certified(mu, nu)?.value)
}

pub fn tv_distance_certified(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<Certified> {
    Ok(signed_parts(mu, nu)?.sup())
}

/// Jordan decomposition masses of `μ − ν`.
pub fn signed_parts(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<SignedParts> {
    let mut parts = SignedParts::default();
    let signed: Vec<(f64, &MeasureComponent)> =
        mu.components().iter().map(|c| (1.0, c)).chain(nu.components().iter().map(|c| (-1.0, c))).collect();
    atom_parts(&signed, &mut parts)?;
    invariant_parts(&signed, &mut parts);
    diffuse_parts(&signed, &mut parts)?;
    Ok(parts)
}

fn atom_parts(signed: &[(f64, &MeasureComponent)], parts: &mut SignedParts) -> Result<()> {
    let mut finite: Vec<(f64, f64)> = Vec::new();
    let mut big: Vec<(f64, &AtomFamily)> = Vec::new();
    for &(s, c) in signed {
        match c {
            MeasureComponent::Atoms(a) => finite.extend(a.atoms().iter().map(|&(x, w)| (x, s * w))),
            MeasureComponent::Family(f) => match f.count() {
                Some(n) if n <= ENUM_LIMIT / 10 => {
                    finite.extend((f.first()..=f.last().unwrap()).map(|i| (f.location(i), s * f.weight(i))));
                }
                _ => big.push((s, f)),
            },
            _ => {}
        }
    }
    if let Some(&(_, f0)) = big.first() {
        let (p, q) = (f0.p(), f0.q());
        if big.iter().any(|(_, f)| f.p() != p) {
            return Err(Error::Unsupported("atom families on different power lattices".into()));
        }
        if big.iter().any(|(_, f)| f.q() != q && !f.is_truncated()) {
            return Err(Error::Unsupported("untruncated atom families with different decay".into()));
        }
        let probe = AtomFamily::new(p, 2.0, 1.0, 1, None)?;
        // past K only untruncated members remain, all decaying like i^{-q}
        let mut k = big.iter().map(|(_, f)| f.last().unwrap_or(f.first())).max().unwrap();
        for &(x, _) in &finite {
            if let Some(i) = probe.index_at(x) {
                k = k.max(i);
            }
        }
        if k > ENUM_LIMIT {
            return Err(Error::Unsupported("atom families too long to compare".into()));
        }
        for &(s, f) in &big {
            let hi = f.last().map_or(k, |n| n.min(k));
            if hi >= f.first() {
                finite.extend((f.first()..=hi).map(|i| (f.location(i), s * f.weight(i))));
            }
        }
        let coef: f64 = big.iter().filter(|(_, f)| !f.is_truncated()).map(|(s, f)| s * f.c()).sum();
        let coef_scale: f64 = big.iter().filter(|(_, f)| !f.is_truncated()).map(|(_, f)| f.c()).sum();
        if coef.abs() > 1e-15 * coef_scale {
            let tail = power_tail(q, k + 1);
            parts.add(coef * tail.value, coef.abs() * tail.error + EPS * coef_scale * tail.value);
        }
    }
    finite.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale: f64 = finite.iter().map(|a| a.1.abs()).sum();
    let err_each = 4.0 * EPS * scale / finite.len().max(1) as f64;
    let mut i = 0;
    while i < finite.len() {
        let x = finite[i].0;
        let (mut pos, mut neg) = (0.0, 0.0);
        while i < finite.len() && finite[i].0 == x {
            if finite[i].1 >= 0.0 {
                pos += finite[i].1;
            } else {
                neg += finite[i].1;
            }
            i += 1;
        }
        let d = pos + neg;
        if d != 0.0 {
            parts.add(d, err_each + EPS * (pos - neg));
        }
    }
    Ok(())
}

fn invariant_parts(signed: &[(f64, &MeasureComponent)], parts: &mut SignedParts) {
    let mut groups: Vec<(&SelfSimilar, f64)> = Vec::new();
    for &(s, c) in signed {
        if let MeasureComponent::SelfSimilar(x) = c {
            if x.depth().is_none() {
                match groups.iter_mut().find(|(g, _)| g.same_shape(x)) {
                    Some(g) => g.1 += s * x.scale(),
                    None => groups.push((x, s * x.scale())),
                }
            }
        }
    }
    for (g, d) in groups {
        parts.add(d, 4.0 * EPS * g.scale());
    }
}

/// A diffuse summand of the difference, with its sign.
enum Diffuse<'a> {
    Pieces(f64, &'a crate::measure::PiecewiseDensity),
    Cylinders(f64, &'a SelfSimilar),
}

impl Diffuse<'_> {
    fn hull(&self) -> (f64, f64) {
        match self {
            Diffuse::Pieces(_, d) => d.hull(),
            Diffuse::Cylinders(_, s) => s.hull(),
        }
    }
}

fn diffuse_parts(signed: &[(f64, &MeasureComponent)], parts: &mut SignedParts) -> Result<()> {
    // block sequences, grouped by ratio
    let mut block_groups: Vec<(f64, Vec<(f64, &GeometricBlocks)>)> = Vec::new();
    let mut approx: Vec<(&SelfSimilar, f64)> = Vec::new();
    let mut others: Vec<Diffuse> = Vec::new();
    for &(s, c) in signed {
        match c {
            MeasureComponent::Blocks(g) => match block_groups.iter_mut().find(|(a, _)| *a == g.a()) {
                Some((_, v)) => v.push((s, g)),
                None => block_groups.push((g.a(), vec![(s, g)])),
            },
            MeasureComponent::SelfSimilar(x) if x.depth().is_some() => {
                match approx.iter_mut().find(|(g, _)| g.same_shape(x)) {
                    Some(g) => g.1 += s * x.scale(),
                    None => approx.push((x, s * x.scale())),
                }
            }
            MeasureComponent::Density(d) => others.push(Diffuse::Pieces(s, d)),
            _ => {}
        }
    }
    // approximants of the same shape collapse to one signed copy
    let mut signed_approx = Vec::new();
    for (x, d) in approx {
        if d != 0.0 {
            signed_approx.push((d.signum(), x.scaled(d.abs() / x.scale())));
        }
    }
    for (s, x) in &signed_approx {
        others.push(Diffuse::Cylinders(*s, x));
    }

    let mut hulls: Vec<(f64, f64)> = others.iter().map(|d| d.hull()).collect();
    for (_, members) in &block_groups {
        let lo = members.iter().map(|(_, g)| g.hull().0).fold(f64::INFINITY, f64::min);
        let hi = members.iter().map(|(_, g)| g.hull().1).fold(f64::NEG_INFINITY, f64::max);
        hulls.push((lo, hi));
    }
    let n_other = others.len();
    for i in 0..hulls.len() {
        for j in (i + 1)..hulls.len() {
            let overlap = hulls[i].1.min(hulls[j].1) - hulls[i].0.max(hulls[j].0);
            if overlap > 0.0 && (i >= n_other || j >= n_other) {
                return Err(Error::Unsupported("block sequence overlapping another density".into()));
            }
        }
    }
    for (_, members) in &block_groups {
        block_group_parts(members, parts)?;
    }
    sweep_parts(&others, &hulls[..n_other], parts)
}

fn block_group_parts(members: &[(f64, &GeometricBlocks)], parts: &mut SignedParts) -> Result<()> {
    let first = members.iter().map(|(_, g)| g.first()).min().unwrap();
    let k = members.iter().map(|(_, g)| g.last().unwrap_or(g.first())).max().unwrap();
    if k - first > ENUM_LIMIT {
        return Err(Error::Unsupported("block sequences too long to compare".into()));
    }
    let scale: f64 = members.iter().map(|(_, g)| g.mass()).sum();
    for i in first..=k {
        let d: f64 = members.iter().map(|(s, g)| s * g.block_mass(i)).sum();
        if d != 0.0 {
            parts.add(d, 8.0 * EPS * scale * (1.0 - members[0].1.a()) * members[0].1.a().powf(i as f64));
        }
    }
    // beyond k every remaining member has the same geometric profile
    let tail: f64 = members.iter().filter(|(_, g)| g.last().is_none()).map(|(s, g)| s * g.tail_mass(k + 1)).sum();
    if tail != 0.0 {
        parts.add(tail, 8.0 * EPS * scale);
    }
    Ok(())
}

fn sweep_parts(others: &[Diffuse], hulls: &[(f64, f64)], parts: &mut SignedParts) -> Result<()> {
    let overlapping = (0..hulls.len())
        .any(|i| ((i + 1)..hulls.len()).any(|j| hulls[i].1.min(hulls[j].1) > hulls[i].0.max(hulls[j].0)));
    if !overlapping {
        for d in others {
            let (s, m) = match d {
                Diffuse::Pieces(s, p) => (*s, p.mass()),
                Diffuse::Cylinders(s, x) => (*s, x.mass()),
            };
            parts.add(s * m, 4.0 * EPS * m);
        }
        return Ok(());
    }
    let mut cuts: Vec<f64> = Vec::new();
    let mut scale = 0.0;
    for d in others {
        match d {
            Diffuse::Pieces(_, p) => {
                scale += p.mass();
                for piece in p.pieces() {
                    cuts.push(piece.a);
                    cuts.push(piece.b);
                }
            }
            Diffuse::Cylinders(_, x) => {
                scale += x.mass();
                cuts.extend(cylinder_ends(x)?);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let err = 8.0 * EPS * scale;
    let mut acc = SignedParts::default();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let h: f64 = others
            .iter()
            .map(|d| match d {
                Diffuse::Pieces(s, p) => s * p.height_at(mid),
                Diffuse::Cylinders(s, x) => s * x.height_at(mid),
            })
            .sum();
        if h != 0.0 {
            acc.add(h * (w[1] - w[0]), 0.0);
        }
    }
    acc.positive.error += err;
    acc.negative.error += err;
    parts.positive += acc.positive;
    parts.negative += acc.negative;
    Ok(())
}

/// Endpoints of every cylinder of an approximant.
fn cylinder_ends(x: &SelfSimilar) -> Result<Vec<f64>> {
    let d = x.depth().expect("approximant");
    let k = x.ifs().len();
    if (k as f64).powi(d as i32) > CYLINDER_LIMIT as f64 {
        return Err(Error::Unsupported("too many cylinders to compare approximants".into()));
    }
    let mut level = vec![(0.0, 1.0)];
    for _ in 0..d {
        let mut next = Vec::with_capacity(level.len() * k);
        for &(lo, len) in &level {
            for (r, o) in x.ifs().ratios().iter().zip(x.ifs().offsets()) {
                next.push((lo + len * o, len * r));
            }
        }
        level = next;
    }
    Ok(level.into_iter().flat_map(|(lo, len)| [lo, lo + len]).collect())
}

/// Closed intervals on which a measure's diffuse part has positive density,
/// plus self-similar parts (which carry no density).
struct Support {
    intervals: Vec<(f64, f64)>,
    /// Approximants whose cylinders were not expanded.
    shapes: Vec<SelfSimilar>,
}

fn diffuse_support(m: &SymbolicMeasure) -> Result<Support> {
    let mut intervals = Vec::new();
    let mut shapes = Vec::new();
    for c in m.components() {
        match c {
            MeasureComponent::Density(d) => intervals.extend(d.pieces().iter().map(|p| (p.a, p.b))),
            MeasureComponent::Blocks(g) => intervals.push(g.hull()),
            MeasureComponent::SelfSimilar(x) if x.depth().is_some() => shapes.push(x.clone()),
            _ => {}
        }
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in intervals {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    Ok(Support { intervals: merged, shapes })
}

/// Length of `[a, b]` not covered by the sorted, disjoint `cover`.
fn uncovered(a: f64, b: f64, cover: &[(f64, f64)]) -> f64 {
    let mut covered = 0.0;
    for &(c, d) in cover {
        let (lo, hi) = (a.max(c), b.min(d));
        if lo < hi {
            covered += hi - lo;
        }
    }
    (b - a) - covered
}

fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `μ ≪ ν`
pub fn abs_continuous(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<bool> {
    for c in mu.components() {
        match c {
            MeasureComponent::Atoms(a) => {
                if a.atoms().iter().any(|&(x, _)| nu.atom_at(x) <= 0.0) {
                    return Ok(false);
                }
            }
            MeasureComponent::Family(f) => {
                if !family_covered(f, nu)? {
                    return Ok(false);
                }
            }
            MeasureComponent::SelfSimilar(x) if x.depth().is_none() => {
                let matched = nu.components().iter().any(|c| match c {
                    MeasureComponent::SelfSimilar(y) => y.same_shape(x),
                    _ => false,
                });
                if !matched {
                    return Ok(false);
                }
            }
            _ => {}
        }
    }
    let ms = diffuse_support(mu)?;
    if ms.intervals.is_empty() && ms.shapes.is_empty() {
        return Ok(true);
    }
    let ns = diffuse_support(nu)?;
    let mut mu_iv = ms.intervals;
    let mut nu_iv = ns.intervals;
    for x in &ms.shapes {
        if ns.shapes.iter().any(|y| y.same_shape(x)) {
            continue;
        }
        mu_iv.extend(cylinder_ends(x)?.chunks(2).map(|c| (c[0], c[1])));
    }
    for y in &ns.shapes {
        if ms.shapes.iter().any(|x| x.same_shape(y)) {
            continue;
        }
        nu_iv.extend(cylinder_ends(y)?.chunks(2).map(|c| (c[0], c[1])));
    }
    let nu_iv = merge(nu_iv);
    Ok(merge(mu_iv).iter().all(|&(a, b)| uncovered(a, b, &nu_iv) <= 1e-12 * (b - a).max(1e-300)))
}

fn family_covered(f: &AtomFamily, nu: &SymbolicMeasure) -> Result<bool> {
    // the lowest index from which ν carries every atom of the lattice
    let full_from = nu
        .components()
        .iter()
        .filter_map(|c| match c {
            MeasureComponent::Family(g) if g.p() == f.p() && !g.is_truncated() => Some(g.first()),
            _ => None,
        })
        .min();
    let check_to = match (f.last(), full_from) {
        (Some(n), Some(k)) => n.min(k.saturating_sub(1)),
        (Some(n), None) => n,
        (None, Some(k)) => k.saturating_sub(1),
        (None, None) => return Ok(false),
    };
    if check_to < f.first() {
        return Ok(true);
    }
    if check_to - f.first() > ENUM_LIMIT {
        return Err(Error::Unsupported("atom family too long to compare".into()));
    }
    Ok((f.first()..=check_to).all(|i| nu.atom_at(f.location(i)) > 0.0))
}

/// Mutual absolute continuity.
pub fn equivalent(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<bool> {
    Ok(abs_continuous(mu, nu)? && abs_continuous(nu, mu)?)
}

/// `Σ|w_μ − w_ν|` over atoms plus `∫|f_μ − f_ν|` over plain densities, computed
/// directly from the pieces. Only atoms and piecewise densities are accepted.
pub fn scheffe_l1(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Option<f64> {
    let mut atoms: BTreeMap<u64, f64> = BTreeMap::new();
    let mut pieces = Vec::new();
    for (s, m) in [(1.0, mu), (-1.0, nu)] {
        for c in m.components() {
            match c {
                MeasureComponent::Atoms(a) => {
                    for &(x, w) in a.atoms() {
                        *atoms.entry(order_key(x)).or_insert(0.0) += s * w;
                    }
                }
                MeasureComponent::Density(d) => pieces.extend(d.pieces().iter().map(|p| (s, *p))),
                _ => return None,
            }
        }
    }
    let mut l1: f64 = atoms.values().map(|w| w.abs()).sum();
    let mut cuts: Vec<f64> = pieces.iter().flat_map(|(_, p)| [p.a, p.b]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let h: f64 = pieces.iter().filter(|(_, p)| p.a <= mid && mid < p.b).map(|(s, p)| s * p.height).sum();
        l1 += h.abs() * (w[1] - w[0]);
    }
    Some(l1)
}

/// Atom locations shared by every measure in the list, or `None` if they differ.
pub fn common_atom_support(measures: &[&SymbolicMeasure]) -> Option<Vec<f64>> {
    let locs = |m: &SymbolicMeasure| -> Option<Vec<f64>> {
        let mut v = Vec::new();
        for c in m.components() {
            match c {
                MeasureComponent::Atoms(a) => v.extend(a.atoms().iter().map(|a| a.0)),
                MeasureComponent::Family(_) => return None,
                _ => {}
            }
        }
        Some(v)
    };
    let first = locs(measures.first()?)?;
    for m in &measures[1..] {
        if locs(m)? != first {
            return None;
        }
    }
    Some(first)
}

/// Total order on doubles usable as a map key.
fn order_key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{mix, Ifs, Piece};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn leb(a: f64, b: f64) -> SymbolicMeasure {
        SymbolicMeasure::lebesgue(a, b).unwrap()
    }

    #[test]
    fn atom_versus_slab() {
        for n in [2.0, 3.0, 10.0, 1000.0] {
            let nu = mix(&[(n - 1.0) / n, 1.0 / n], &[SymbolicMeasure::dirac(0.0), leb(1.0, 2.0)]).unwrap();
            assert_abs_diff_eq!(tv_distance(&nu, &SymbolicMeasure::dirac(0.0)).unwrap(), 1.0 / n, epsilon = 1e-12);
        }
    }

    #[test]
    fn truncated_block_sequence() {
        for a in [0.3, 0.5, 0.9] {
            let nu = SymbolicMeasure::geometric_blocks(a, None).unwrap();
            for n in [0u64, 1, 3, 10, 30] {
                let nn = SymbolicMeasure::geometric_blocks(a, Some(n)).unwrap();
                let d = tv_distance_certified(&nn, &nu).unwrap();
                assert_abs_diff_eq!(d.value, a.powi(n as i32 + 1), epsilon = 1e-12);
                assert!(d.error < 1e-10);
            }
        }
    }

    #[test]
    fn family_tails() {
        let nu = SymbolicMeasure::atom_family(1.0, 2.0, 1.0, None).unwrap();
        for n in [1u64, 5, 100, 10_000] {
            let nn = SymbolicMeasure::atom_family(1.0, 2.0, 1.0, Some(n)).unwrap();
            let tail: f64 = power_tail(2.0, n + 1).value;
            assert_abs_diff_eq!(tv_distance(&nn, &nu).unwrap(), tail, epsilon = 1e-13);
        }
        let other = SymbolicMeasure::atom_family(2.0, 2.0, 1.0, None).unwrap();
        assert!(tv_distance(&nu, &other).is_err());
    }

    #[test]
    fn grid_atoms_versus_uniform() {
        let n = 17;
        let grid = SymbolicMeasure::atoms((1..=n).map(|i| (i as f64 / n as f64, 1.0 / n as f64)).collect()).unwrap();
        assert_abs_diff_eq!(tv_distance(&grid, &leb(0.0, 1.0)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_self_similar() {
        let ifs = Ifs::evenly_spaced(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let nat = SymbolicMeasure::natural_self_similar(ifs.clone());
        assert_eq!(tv_distance(&nat, &nat).unwrap(), 0.0);
        assert_abs_diff_eq!(tv_distance(&nat, &leb(0.0, 1.0)).unwrap(), 1.0, epsilon = 1e-12);
        let skew = SymbolicMeasure::self_similar(ifs, vec![0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(tv_distance(&nat, &skew).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn overlapping_densities() {
        let a = leb(0.0, 1.0);
        let b = SymbolicMeasure::density(vec![Piece { a: 0.5, b: 1.5, height: 2.0 }]).unwrap();
        // μ − ν = +1 on [0, .5), −1 on [.5, 1), −2 on [1, 1.5)
        let p = signed_parts(&a, &b).unwrap();
        assert_abs_diff_eq!(p.positive.value, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.negative.value, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn absolute_continuity_examples() {
        assert!(abs_continuous(&leb(0.0, 0.5), &leb(0.0, 1.0)).unwrap());
        assert!(!abs_continuous(&SymbolicMeasure::dirac(0.0), &leb(0.0, 1.0)).unwrap());
        let nu10 = mix(&[0.1, 1.0], &[SymbolicMeasure::dirac(0.0), leb(0.1, 1.0)]).unwrap();
        assert!(!abs_continuous(&nu10, &leb(0.0, 1.0)).unwrap());
        assert!(equivalent(&leb(0.0, 1.0), &leb(0.0, 1.0).scaled(2.0).unwrap()).unwrap());
        assert!(!equivalent(&leb(0.0, 1.0), &leb(0.0, 0.5)).unwrap());
        let f = SymbolicMeasure::atom_family(1.0, 2.0, 1.0, None).unwrap();
        assert!(equivalent(&f, &f.normalize().unwrap()).unwrap());
        let fn_ = SymbolicMeasure::atom_family(1.0, 2.0, 1.0, Some(40)).unwrap();
        assert!(abs_continuous(&fn_, &f).unwrap());
        assert!(!abs_continuous(&f, &fn_).unwrap());
        let blocks = SymbolicMeasure::geometric_blocks(0.5, None).unwrap();
        assert!(equivalent(&blocks, &leb(0.0, 1.0)).unwrap());
        assert!(abs_continuous(&SymbolicMeasure::geometric_blocks(0.5, Some(3)).unwrap(), &blocks).unwrap());
        assert!(!abs_continuous(&blocks, &SymbolicMeasure::geometric_blocks(0.5, Some(3)).unwrap()).unwrap());
    }

    #[test]
    fn scheffe_matches_jordan_total() {
        let a = leb(0.0, 1.0);
        let b = SymbolicMeasure::density(vec![Piece { a: 0.5, b: 1.5, height: 2.0 }]).unwrap();
        assert_abs_diff_eq!(scheffe_l1(&a, &b).unwrap(), 2.0, epsilon = 1e-15);
    }

    fn arb() -> impl Strategy<Value = SymbolicMeasure> {
        let atoms = prop::collection::vec((0usize..8, 0.05f64..1.0), 0..4);
        let pieces = prop::collection::vec((0usize..8, 1usize..4, 0.0f64..2.0), 0..3);
        let fam = prop::option::of((0.1f64..1.0, prop::option::of(1u64..50)));
        (atoms, pieces, fam).prop_filter_map("nonzero", |(atoms, pieces, fam)| {
            // a shared grid of locations so that atoms and breakpoints collide often
            let x = |k: usize| k as f64 / 8.0;
            let mut parts = Vec::new();
            if !atoms.is_empty() {
                parts.push(SymbolicMeasure::atoms(atoms.iter().map(|&(k, w)| (x(k), w)).collect()).ok()?);
            }
            let ps: Vec<Piece> = pieces.iter().map(|&(k, l, h)| Piece { a: x(k), b: x(k + l), height: h }).collect();
            if !ps.is_empty() {
                parts.push(
                    SymbolicMeasure::new(vec![MeasureComponent::Density(
                        crate::measure::PiecewiseDensity::superpose(&ps).ok()?,
                    )])
                    .ok()?,
                );
            }
            if let Some((c, last)) = fam {
                parts.push(SymbolicMeasure::atom_family(1.0, 2.0, c, last).ok()?);
            }
            let m = mix(&vec![1.0; parts.len()], &parts).ok()?;
            (!m.is_zero()).then_some(m)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn metric_axioms(a in arb(), b in arb(), c in arb()) {
            let ab = tv_distance(&a, &b).unwrap();
            let ba = tv_distance(&b, &a).unwrap();
            let bc = tv_distance(&b, &c).unwrap();
            let ac = tv_distance(&a, &c).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-10);
            prop_assert!(tv_distance(&a, &a).unwrap() <= 1e-10);
            prop_assert!(ac <= ab + bc + 1e-10);
            // distinct measures are at positive distance
            let probe = (a.cdf(0.3) - b.cdf(0.3)).abs().max((a.total_mass() - b.total_mass()).abs());
            if probe > 1e-9 {
                prop_assert!(ab >= probe - 1e-10);
            }
        }

        #[test]
        fn mixture_bound(a in arb(), b in arb(), alpha in 0.01f64..0.99) {
            let (a, b) = (a.normalize().unwrap(), b.normalize().unwrap());
            let m = mix(&[alpha, 1.0 - alpha], &[a.clone(), b.clone()]).unwrap();
            let d = tv_distance(&m, &a).unwrap();
            prop_assert!(d <= (1.0 - alpha) * a.total_mass().max(b.total_mass()) + 1e-10);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        }

        #[test]
        fn absolute_continuity_is_a_preorder(a in arb(), b in arb(), c in arb()) {
            prop_assert!(abs_continuous(&a, &a).unwrap());
            if abs_continuous(&a, &b).unwrap() && abs_continuous(&b, &c).unwrap() {
                prop_assert!(abs_continuous(&a, &c).unwrap());
            }
            prop_assert_eq!(equivalent(&a, &b).unwrap(), equivalent(&b, &a).unwrap());
        }
    }
}
