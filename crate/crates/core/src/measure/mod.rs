//! Finite Borel measures on the line, represented symbolically.

mod component;
mod ifs;
mod sample;
mod testset;

pub use component::{AtomFamily, AtomList, GeometricBlocks, MeasureComponent, Piece, PiecewiseDensity, SelfSimilar};
pub use ifs::Ifs;
pub use testset::{BorelTestSet, Interval, Skeleton};

pub(crate) use component::INDEX_LIMIT;

use crate::certified::Certified;
use crate::error::{Error, Result};

/// Truncated families with at most this many atoms are expanded into explicit lists
/// when restricted.
const EXPAND_LIMIT: u64 = 100_000;
/// Upper bound on atoms enumerated when a skeleton meets a foreign family.
const ENUMERATE_LIMIT: u64 = 2_000_000;

/// A finite measure given as a sum of symbolic components, kept in canonical form:
/// all explicit atoms in one list, all plain densities in one density, and
/// families, block sequences and self-similar parts merged when they differ
/// only by a scale factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicMeasure {
    components: Vec<MeasureComponent>,
    total_mass: f64,
}

impl SymbolicMeasure {
    pub fn new(components: Vec<MeasureComponent>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut pieces: Vec<Piece> = Vec::new();
        let mut families: Vec<AtomFamily> = Vec::new();
        let mut blocks: Vec<GeometricBlocks> = Vec::new();
        let mut selfsim: Vec<SelfSimilar> = Vec::new();
        for c in components {
            match c {
                MeasureComponent::Atoms(a) => atoms.extend_from_slice(a.atoms()),
                MeasureComponent::Density(d) => pieces.extend_from_slice(d.pieces()),
                MeasureComponent::Family(f) => {
                    match families
                        .iter_mut()
                        .find(|g| g.p() == f.p() && g.q() == f.q() && g.first() == f.first() && g.last() == f.last())
                    {
                        Some(g) => *g = AtomFamily::new(g.p(), g.q(), g.c() + f.c(), g.first(), g.last())?,
                        None => families.push(f),
                    }
                }
                MeasureComponent::Blocks(b) => {
                    match blocks.iter_mut().find(|g| g.a() == b.a() && g.first() == b.first() && g.last() == b.last()) {
                        Some(g) => *g = g.scaled((g.scale() + b.scale()) / g.scale()),
                        None => blocks.push(b),
                    }
                }
                MeasureComponent::SelfSimilar(s) => match selfsim.iter_mut().find(|g| g.same_shape(&s)) {
                    Some(g) => *g = g.scaled((g.scale() + s.scale()) / g.scale()),
                    None => selfsim.push(s),
                },
            }
        }
        let mut out = Vec::new();
        if !atoms.is_empty() {
            out.push(MeasureComponent::Atoms(AtomList::new(atoms)?));
        }
        families.sort_by(|a, b| {
            a.p()
                .total_cmp(&b.p())
                .then(a.q().total_cmp(&b.q()))
                .then(a.first().cmp(&b.first()))
                .then(a.last().unwrap_or(u64::MAX).cmp(&b.last().unwrap_or(u64::MAX)))
        });
        out.extend(families.into_iter().map(MeasureComponent::Family));
        if !pieces.is_empty() {
            let d = PiecewiseDensity::superpose(&pieces)?;
            if !d.pieces().is_empty() {
                out.push(MeasureComponent::Density(d));
            }
        }
        blocks.sort_by(|a, b| {
            a.a()
                .total_cmp(&b.a())
                .then(a.first().cmp(&b.first()))
                .then(a.last().unwrap_or(u64::MAX).cmp(&b.last().unwrap_or(u64::MAX)))
        });
        out.extend(blocks.into_iter().map(MeasureComponent::Blocks));
        out.extend(selfsim.into_iter().map(MeasureComponent::SelfSimilar));
        let total_mass = out.iter().map(|c| c.mass()).sum();
        Ok(Self { components: out, total_mass })
    }

    pub fn zero() -> Self {
        Self { components: Vec::new(), total_mass: 0.0 }
    }

    pub fn dirac(x: f64) -> Self {
        Self::atoms(vec![(x, 1.0)]).expect("finite location")
    }

    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(vec![MeasureComponent::Atoms(AtomList::new(atoms)?)])
    }

    /// Lebesgue measure restricted to `[a, b]`.
    pub fn lebesgue(a: f64, b: f64) -> Result<Self> {
        Self::density(vec![Piece { a, b, height: 1.0 }])
    }

    pub fn density(pieces: Vec<Piece>) -> Result<Self> {
        Self::new(vec![MeasureComponent::Density(PiecewiseDensity::new(pieces)?)])
    }

    pub fn atom_family(p: f64, q: f64, c: f64, n_max: Option<u64>) -> Result<Self> {
        Self::new(vec![MeasureComponent::Family(AtomFamily::new(p, q, c, 1, n_max)?)])
    }

    pub fn geometric_blocks(a: f64, n_max: Option<u64>) -> Result<Self> {
        Self::new(vec![MeasureComponent::Blocks(GeometricBlocks::new(a, 0, n_max, 1.0)?)])
    }

    pub fn natural_self_similar(ifs: Ifs) -> Self {
        Self::new(vec![MeasureComponent::SelfSimilar(SelfSimilar::natural(ifs))]).expect("valid")
    }

    pub fn self_similar(ifs: Ifs, weights: Vec<f64>) -> Result<Self> {
        Self::new(vec![MeasureComponent::SelfSimilar(SelfSimilar::new(ifs, weights, 1.0, None)?)])
    }

    pub fn components(&self) -> &[MeasureComponent] {
        &self.components
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass - 1.0).abs() <= 1e-12
    }

    /// Smallest interval containing every component's support.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.components.iter().map(|c| c.hull()).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    pub fn cdf_certified(&self, x: f64) -> Certified {
        self.components.iter().map(|c| c.cdf(x)).sum()
    }

    pub fn cdf_left_certified(&self, x: f64) -> Certified {
        self.components.iter().map(|c| c.cdf_left(x)).sum()
    }

    /// `μ((−∞, x])`
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_certified(x).value.clamp(0.0, self.total_mass)
    }

    /// `μ((−∞, x))`
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.cdf_left_certified(x).value.clamp(0.0, self.total_mass)
    }

    /// `∫_{−∞}^{x} F(t) dt`
    pub fn primitive(&self, x: f64) -> Certified {
        self.components.iter().map(|c| c.primitive(x)).sum()
    }

    pub fn atom_at(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.atom_at(x)).sum()
    }

    pub fn interval_mass(&self, iv: &Interval) -> Certified {
        interval_mass_of(iv, |y| self.cdf_certified(y), |y| self.cdf_left_certified(y))
    }

    /// Mass of the closed ball `[x − r, x + r]`.
    pub fn ball_mass_certified(&self, x: f64, r: f64) -> Certified {
        self.interval_mass(&Interval::closed(x - r, x + r))
    }

    pub fn ball_mass(&self, x: f64, r: f64) -> f64 {
        self.ball_mass_certified(x, r).value.clamp(0.0, self.total_mass)
    }

    /// `μ(A)` with a certified absolute error.
    pub fn mass(&self, set: &BorelTestSet) -> Result<Certified> {
        let mut total = Certified::ZERO;
        for c in &self.components {
            total += finite_part_mass(c, set);
        }
        if let Some(sk) = set.skeleton_ref() {
            total += self.skeleton_mass(sk, set)?;
        }
        let v = total.non_negative();
        if v.value > self.total_mass {
            return Ok(Certified::new(self.total_mass, v.error + (v.value - self.total_mass)));
        }
        Ok(v)
    }

    /// Mass of the skeleton points not already counted in the finite part of `set`.
    fn skeleton_mass(&self, sk: &Skeleton, set: &BorelTestSet) -> Result<Certified> {
        let mut total = Certified::ZERO;
        match sk {
            Skeleton::Points { points, .. } => {
                for &x in points {
                    if !set.contains_finite_part(x) {
                        total += Certified::exact(self.atom_at(x));
                    }
                }
            }
            Skeleton::PowerLattice { p } => {
                let probe = AtomFamily::new(*p, 2.0, 1.0, 1, None)
                    .map_err(|_| Error::InvalidSet(format!("power lattice needs p > 0, got {p}")))?;
                let on_lattice = |x: f64| probe.index_at(x).is_some();
                for c in &self.components {
                    match c {
                        MeasureComponent::Atoms(a) => {
                            for &(x, w) in a.atoms() {
                                if on_lattice(x) && !set.contains_finite_part(x) {
                                    total += Certified::exact(w);
                                }
                            }
                        }
                        MeasureComponent::Family(f) if f.p() == *p => {
                            total += (f.mass_certified() - finite_part_mass(c, set)).non_negative();
                        }
                        MeasureComponent::Family(f) => {
                            total += enumerate_family(f, |x| on_lattice(x) && !set.contains_finite_part(x))?;
                        }
                        _ => {}
                    }
                }
            }
            Skeleton::Attractor(ifs) => {
                for c in &self.components {
                    match c {
                        MeasureComponent::Atoms(a) => {
                            for &(x, w) in a.atoms() {
                                if ifs.attractor_contains(x) && !set.contains_finite_part(x) {
                                    total += Certified::exact(w);
                                }
                            }
                        }
                        MeasureComponent::Family(f) => {
                            total +=
                                enumerate_family(f, |x| ifs.attractor_contains(x) && !set.contains_finite_part(x))?;
                        }
                        MeasureComponent::SelfSimilar(s) if s.depth().is_none() => {
                            if s.ifs() == ifs {
                                total += (Certified::exact(s.mass()) - finite_part_mass(c, set)).non_negative();
                            } else {
                                return Err(Error::UnsupportedSet(
                                    "attractor of a different IFS against a self-similar measure".into(),
                                ));
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(total)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameters(format!("scale factor {c} must be non-negative")));
        }
        if c == 0.0 {
            return Ok(Self::zero());
        }
        Self::new(self.components.iter().map(|x| x.scaled(c)).collect())
    }

    pub fn normalize(&self) -> Result<Self> {
        if !(self.total_mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        self.scaled(1.0 / self.total_mass)
    }

    /// `μ|_A` for a finite union of intervals and points.
    pub fn restrict(&self, set: &BorelTestSet) -> Result<Self> {
        if set.skeleton_ref().is_some() {
            return Err(Error::UnsupportedSet("restriction to a skeleton set".into()));
        }
        let mut out = Vec::new();
        for c in &self.components {
            restrict_component(c, set, &mut out)?;
        }
        Self::new(out)
    }
}

/// `Σ c_i μ_i`
pub fn mix(coefficients: &[f64], measures: &[SymbolicMeasure]) -> Result<SymbolicMeasure> {
    if coefficients.len() != measures.len() || coefficients.is_empty() {
        return Err(Error::InvalidParameters("mix needs matching, nonempty lists".into()));
    }
    let mut comps = Vec::new();
    for (&c, m) in coefficients.iter().zip(measures) {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameters(format!("mixing coefficient {c} must be positive")));
        }
        comps.extend(m.components.iter().map(|x| x.scaled(c)));
    }
    SymbolicMeasure::new(comps)
}

fn interval_mass_of(iv: &Interval, cdf: impl Fn(f64) -> Certified, cdf_left: impl Fn(f64) -> Certified) -> Certified {
    let upper = if iv.hi_closed { cdf(iv.hi) } else { cdf_left(iv.hi) };
    let lower = if iv.lo_closed { cdf_left(iv.lo) } else { cdf(iv.lo) };
    (upper - lower).non_negative()
}

/// Component mass on the intervals and points of `set`.
fn finite_part_mass(c: &MeasureComponent, set: &BorelTestSet) -> Certified {
    let mut total = Certified::ZERO;
    for iv in set.intervals_ref() {
        total += interval_mass_of(iv, |y| c.cdf(y), |y| c.cdf_left(y));
    }
    for &x in set.points_ref() {
        total += Certified::exact(c.atom_at(x));
    }
    total
}

fn enumerate_family(f: &AtomFamily, keep: impl Fn(f64) -> bool) -> Result<Certified> {
    match f.count() {
        Some(n) if n <= ENUMERATE_LIMIT => {
            let last = f.last().unwrap();
            let mut s = 0.0;
            for i in (f.first()..=last).rev() {
                let x = f.location(i);
                if keep(x) {
                    s += f.weight(i);
                }
            }
            Ok(Certified::new(s, 2.0 * f64::EPSILON * n as f64 * s))
        }
        _ => Err(Error::UnsupportedSet("skeleton against an unenumerable atom family".into())),
    }
}

fn restrict_component(c: &MeasureComponent, set: &BorelTestSet, out: &mut Vec<MeasureComponent>) -> Result<()> {
    match c {
        MeasureComponent::Atoms(a) => {
            let kept: Vec<_> = a.atoms().iter().copied().filter(|&(x, _)| set.contains_finite_part(x)).collect();
            if !kept.is_empty() {
                out.push(MeasureComponent::Atoms(AtomList::new(kept)?));
            }
        }
        MeasureComponent::Density(d) => {
            let mut pieces = Vec::new();
            for iv in set.intervals_ref() {
                for p in d.pieces() {
                    let (a, b) = (p.a.max(iv.lo), p.b.min(iv.hi));
                    if a < b {
                        pieces.push(Piece { a, b, height: p.height });
                    }
                }
            }
            if !pieces.is_empty() {
                out.push(MeasureComponent::Density(PiecewiseDensity::new(pieces)?));
            }
        }
        MeasureComponent::Family(f) => {
            let mut atoms = Vec::new();
            for iv in set.intervals_ref() {
                if let Some((i, j)) = family_range(f, iv) {
                    match j {
                        Some(j) if j - i < EXPAND_LIMIT => atoms.extend((i..=j).map(|k| (f.location(k), f.weight(k)))),
                        _ => out.push(MeasureComponent::Family(AtomFamily::new(f.p(), f.q(), f.c(), i, j)?)),
                    }
                }
            }
            for &x in set.points_ref() {
                let w = f.atom_at(x);
                if w > 0.0 {
                    atoms.push((x, w));
                }
            }
            if !atoms.is_empty() {
                out.push(MeasureComponent::Atoms(AtomList::new(atoms)?));
            }
        }
        MeasureComponent::Blocks(g) => {
            for iv in set.intervals_ref() {
                restrict_blocks(g, iv, out)?;
            }
        }
        MeasureComponent::SelfSimilar(s) => {
            let inside = finite_part_mass(c, set);
            if inside.upper() <= 1e-12 * s.mass() {
                return Ok(());
            }
            if inside.lower() >= s.mass() * (1.0 - 1e-12) {
                out.push(c.clone());
                return Ok(());
            }
            return Err(Error::Unsupported("restriction cutting through a self-similar component".into()));
        }
    }
    Ok(())
}

/// Index range of family atoms inside `iv`, or `None` when empty.
fn family_range(f: &AtomFamily, iv: &Interval) -> Option<(u64, Option<u64>)> {
    // locations decrease with the index
    let probe = AtomFamily::new(f.p(), f.q(), 1.0, 1, None).expect("valid probe");
    let first = lowest_index_not_above(&probe, iv.hi, iv.hi_closed)?;
    let last = if iv.lo <= 0.0 {
        None
    } else {
        // first index strictly outside on the low side
        match lowest_index_not_above(&probe, iv.lo, !iv.lo_closed) {
            Some(j) if j > 1 => Some(j - 1),
            Some(_) => return None,
            None => None,
        }
    };
    let i = first.max(f.first());
    let j = match (last, f.last()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    match j {
        Some(j) if j < i => None,
        _ => Some((i, j)),
    }
}

/// Smallest `i` with `i^{-p} ≤ y` (`< y` unless `inclusive`).
fn lowest_index_not_above(probe: &AtomFamily, y: f64, inclusive: bool) -> Option<u64> {
    if y <= 0.0 {
        return None;
    }
    let ok = |i: u64| if inclusive { probe.location(i) <= y } else { probe.location(i) < y };
    if ok(1) {
        return Some(1);
    }
    let guess = y.powf(-1.0 / probe.p());
    if !(guess < INDEX_LIMIT as f64) {
        return Some(INDEX_LIMIT);
    }
    let mut i = (guess as u64).max(2);
    while i > 2 && ok(i - 1) {
        i -= 1;
    }
    while !ok(i) {
        i += 1;
    }
    Some(i)
}

fn restrict_blocks(g: &GeometricBlocks, iv: &Interval, out: &mut Vec<MeasureComponent>) -> Result<()> {
    let (bottom, top) = g.hull();
    let hi = iv.hi.min(top);
    let lo = iv.lo.max(bottom);
    if !(lo < hi) || hi <= 0.0 {
        return Ok(());
    }
    let i_top = g.block_index(hi).max(g.first());
    // blocks strictly below lo are excluded
    let i_bottom = if lo <= 0.0 || lo <= bottom { g.last() } else { Some(g.block_index(lo)) };
    let piece_of = |i: u64, a: f64, b: f64| -> Option<Piece> {
        let (blo, bhi) = g.block(i);
        let (a, b) = (a.max(blo), b.min(bhi));
        (a < b && bhi > blo).then(|| Piece { a, b, height: g.block_mass(i) / (bhi - blo) })
    };
    if i_bottom == Some(i_top) {
        if let Some(p) = piece_of(i_top, lo, hi) {
            out.push(MeasureComponent::Density(PiecewiseDensity::new(vec![p])?));
        }
        return Ok(());
    }
    let mut pieces = Vec::new();
    let mut full_from = i_top;
    if hi < g.edge(i_top) {
        pieces.extend(piece_of(i_top, lo, hi));
        full_from = i_top + 1;
    }
    let mut full_to = i_bottom;
    if let Some(j) = i_bottom {
        if lo > g.edge(j + 1) {
            pieces.extend(piece_of(j, lo, hi));
            full_to = Some(j - 1);
        } else {
            full_to = Some(j);
        }
    }
    if full_to.is_none_or(|t| t >= full_from) {
        let mass = match full_to {
            Some(t) => g.range_mass(full_from, t),
            None => g.tail_mass(full_from),
        };
        if mass > 0.0 {
            out.push(MeasureComponent::Blocks(GeometricBlocks::new(g.a(), full_from, full_to, mass)?));
        }
    }
    if !pieces.is_empty() {
        out.push(MeasureComponent::Density(PiecewiseDensity::new(pieces)?));
    }
    Ok(())
}
