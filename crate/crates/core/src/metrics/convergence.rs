//! Finite-horizon convergence checks for sequences of symbolic measures.
//!
//! A verdict is evidence up to the horizon, never a proof about the limit.
//! Refutations always carry a witness set whose mass gap stays above the
//! tolerance along the whole tail `[⌈h/2⌉, h]`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::tv::{common_atom_support, scheffe_l1, tv_distance};
use crate::error::{Error, Result};
use crate::measure::{BorelTestSet, Interval, MeasureComponent, Skeleton, SymbolicMeasure};
use crate::par::{map_range, map_slice, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weak,
    Setwise,
    Tv,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weak => "weak",
            Mode::Setwise => "setwise",
            Mode::Tv => "tv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Certified,
    Refuted,
    Unknown,
}

/// A test set on which the sequence stays away from the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub description: String,
    pub set: BorelTestSet,
    pub limit_mass: f64,
    /// Smallest `|ν_n(A) − ν(A)|` over the tail.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub mode: Mode,
    pub status: Status,
    pub certificate: String,
    pub witness: Option<Witness>,
    pub horizon: u64,
    pub tol: f64,
    /// Distance (or gap) per index, for display.
    pub series: Vec<(u64, f64)>,
}

pub type Generator = Arc<dyn Fn(u64) -> Result<SymbolicMeasure> + Send + Sync>;

/// Indexed measures `ν_n`, `n ≥ first_index`, with a declared limit.
#[derive(Clone)]
pub struct MeasureSequence {
    name: String,
    first_index: u64,
    generator: Generator,
    limit: SymbolicMeasure,
    declared_mode: Option<Mode>,
}

impl fmt::Debug for MeasureSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSequence")
            .field("name", &self.name)
            .field("first_index", &self.first_index)
            .field("limit", &self.limit)
            .field("declared_mode", &self.declared_mode)
            .finish()
    }
}

impl MeasureSequence {
    pub fn new(
        name: impl Into<String>,
        first_index: u64,
        generator: impl Fn(u64) -> Result<SymbolicMeasure> + Send + Sync + 'static,
        limit: SymbolicMeasure,
    ) -> Self {
        Self { name: name.into(), first_index, generator: Arc::new(generator), limit, declared_mode: None }
    }

    pub fn with_declared_mode(mut self, mode: Mode) -> Self {
        self.declared_mode = Some(mode);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn first_index(&self) -> u64 {
        self.first_index
    }

    pub fn limit(&self) -> &SymbolicMeasure {
        &self.limit
    }

    pub fn declared_mode(&self) -> Option<Mode> {
        self.declared_mode
    }

    pub fn term(&self, n: u64) -> Result<SymbolicMeasure> {
        if n < self.first_index {
            return Err(Error::InvalidParameters(format!("index {n} precedes the first index {}", self.first_index)));
        }
        (self.generator)(n)
    }

    /// Terms `ν_n` for `n` in `[from, to]`, in index order.
    pub fn terms(&self, from: u64, to: u64) -> Result<Vec<(u64, SymbolicMeasure)>> {
        let from = from.max(self.first_index);
        if to < from {
            return Ok(Vec::new());
        }
        map_range(Execution::auto(), 0..(to - from + 1) as usize, |k| {
            let n = from + k as u64;
            self.term(n).map(|m| (n, m))
        })
        .into_iter()
        .collect()
    }

    /// The same sequence with every term and the limit scaled to mass 1.
    pub fn normalized(&self) -> Result<Self> {
        let generator = self.generator.clone();
        Ok(Self {
            name: self.name.clone(),
            first_index: self.first_index,
            generator: Arc::new(move |n| generator(n)?.normalize()),
            limit: self.limit.normalize()?,
            declared_mode: self.declared_mode,
        })
    }

    /// `[max(first, ⌈h/2⌉), h]`
    pub fn tail(&self, horizon: u64) -> (u64, u64) {
        (horizon.div_ceil(2).max(self.first_index), horizon)
    }
}

/// Trend check: the second half of a tail never rises above the first half's maximum.
fn settles(values: &[f64]) -> bool {
    if values.len() < 2 {
        return true;
    }
    let mid = values.len() / 2;
    let head = values[..mid].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rest = values[mid..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    rest <= head + 1e-12
}

fn tail_values(series: &[(u64, f64)], from: u64) -> Vec<f64> {
    series.iter().filter(|(n, _)| *n >= from).map(|p| p.1).collect()
}

fn check_horizon(seq: &MeasureSequence, horizon: u64, tol: f64) -> Result<()> {
    if horizon < seq.first_index() {
        return Err(Error::InvalidParameters(format!("horizon {horizon} precedes the first index")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameters(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

/// TV convergence: certified when the distance series settles below `tol` by the horizon.
pub fn tv_converges(seq: &MeasureSequence, horizon: u64, tol: f64) -> Result<ConvergenceVerdict> {
    check_horizon(seq, horizon, tol)?;
    let terms = seq.terms(seq.first_index(), horizon)?;
    let distances: Vec<Result<f64>> = map_slice(Execution::auto(), &terms, |(_, m)| tv_distance(m, seq.limit()));
    let mut series = Vec::with_capacity(terms.len());
    for ((n, _), d) in terms.iter().zip(distances) {
        match d {
            Ok(d) => series.push((*n, d)),
            Err(e) => {
                return Ok(ConvergenceVerdict {
                    mode: Mode::Tv,
                    status: Status::Unknown,
                    certificate: format!("TV distance unavailable at n = {n}: {e}"),
                    witness: None,
                    horizon,
                    tol,
                    series,
                })
            }
        }
    }
    let (from, _) = seq.tail(horizon);
    let tail = tail_values(&series, from);
    let last = *tail.last().unwrap();
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut verdict = ConvergenceVerdict {
        mode: Mode::Tv,
        status: Status::Unknown,
        certificate: String::new(),
        witness: None,
        horizon,
        tol,
        series,
    };
    if last < tol && settles(&tail) {
        verdict.status = Status::Certified;
        verdict.certificate = format!("TV distance settles to {last:.3e} < {tol} by n = {horizon}");
    } else if min > tol {
        let tail_terms: Vec<&SymbolicMeasure> = terms.iter().filter(|(n, _)| *n >= from).map(|(_, m)| m).collect();
        match find_witness(seq.limit(), &tail_terms, tol) {
            Some(w) => {
                verdict.status = Status::Refuted;
                verdict.certificate = format!("TV distance stays ≥ {min:.3e} > {tol} over n ∈ [{from}, {horizon}]");
                verdict.witness = Some(w);
            }
            None => {
                verdict.certificate =
                    format!("TV distance stays ≥ {min:.3e} but no single witness set was found among the candidates");
            }
        }
    } else {
        verdict.certificate = format!("TV distance at n = {horizon} is {last:.3e}; no trend below {tol}");
    }
    Ok(verdict)
}

/// Setwise convergence: refuted by a persistent witness, certified by TV or by a
/// Scheffé (atoms on a fixed support plus L1 densities) certificate.
pub fn setwise_converges(seq: &MeasureSequence, horizon: u64, tol: f64) -> Result<ConvergenceVerdict> {
    check_horizon(seq, horizon, tol)?;
    let (from, _) = seq.tail(horizon);
    let terms = seq.terms(from, horizon)?;
    let tail_terms: Vec<&SymbolicMeasure> = terms.iter().map(|(_, m)| m).collect();
    if let Some(w) = find_witness(seq.limit(), &tail_terms, tol) {
        let series = terms
            .iter()
            .map(|(n, m)| (*n, (m.mass(&w.set).map(|c| c.value).unwrap_or(f64::NAN) - w.limit_mass).abs()))
            .collect();
        return Ok(ConvergenceVerdict {
            mode: Mode::Setwise,
            status: Status::Refuted,
            certificate: format!("mass gap ≥ {:.3e} on {} over n ∈ [{from}, {horizon}]", w.gap, w.description),
            witness: Some(w),
            horizon,
            tol,
            series,
        });
    }
    let tv = tv_converges(seq, horizon, tol)?;
    if tv.status == Status::Certified {
        return Ok(ConvergenceVerdict {
            mode: Mode::Setwise,
            status: Status::Certified,
            certificate: format!("dominated by TV: {}", tv.certificate),
            witness: None,
            horizon,
            tol,
            series: tv.series,
        });
    }
    let mut verdict = ConvergenceVerdict {
        mode: Mode::Setwise,
        status: Status::Unknown,
        certificate: "no witness among the candidate sets and no analytic certificate".into(),
        witness: None,
        horizon,
        tol,
        series: Vec::new(),
    };
    let mut all: Vec<&SymbolicMeasure> = tail_terms.clone();
    all.push(seq.limit());
    if common_atom_support(&all).is_some() {
        let l1: Option<Vec<(u64, f64)>> =
            terms.iter().map(|(n, m)| scheffe_l1(m, seq.limit()).map(|d| (*n, d))).collect();
        if let Some(l1) = l1 {
            let values: Vec<f64> = l1.iter().map(|p| p.1).collect();
            let last = *values.last().unwrap();
            if last < tol && settles(&values) {
                verdict.status = Status::Certified;
                verdict.certificate =
                    format!("Scheffé: fixed atom support and L1 distance {last:.3e} < {tol} by n = {horizon}");
            }
            verdict.series = l1;
        }
    }
    Ok(verdict)
}

/// Weak convergence via the Lévy distance between CDFs on a continuity grid.
pub fn weak_converges(seq: &MeasureSequence, horizon: u64, tol: f64) -> Result<ConvergenceVerdict> {
    check_horizon(seq, horizon, tol)?;
    let limit = seq.limit();
    if !limit.is_probability() {
        return Err(Error::NotProbability(limit.total_mass()));
    }
    let terms = seq.terms(seq.first_index(), horizon)?;
    if let Some((_, m)) = terms.iter().find(|(_, m)| !m.is_probability()) {
        return Err(Error::NotProbability(m.total_mass()));
    }
    let (lo, hi) = terms
        .iter()
        .filter_map(|(_, m)| m.bounds())
        .chain(limit.bounds())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    let grid = continuity_grid(limit, lo, hi);
    let limit_at: Vec<f64> = grid.iter().map(|&x| limit.cdf(x)).collect();
    let rows: Vec<(f64, Vec<f64>)> = map_slice(Execution::auto(), &terms, |(_, m)| {
        let fx: Vec<f64> = grid.iter().map(|&x| m.cdf(x)).collect();
        (levy_on_grid(limit, &grid, &fx), fx)
    });
    let series: Vec<(u64, f64)> = terms.iter().zip(&rows).map(|((n, _), (d, _))| (*n, *d)).collect();
    let (from, _) = seq.tail(horizon);
    let tail = tail_values(&series, from);
    let last = *tail.last().unwrap();
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut verdict = ConvergenceVerdict {
        mode: Mode::Weak,
        status: Status::Unknown,
        certificate: String::new(),
        witness: None,
        horizon,
        tol,
        series,
    };
    if last < tol && settles(&tail) {
        verdict.status = Status::Certified;
        verdict.certificate = format!("Lévy distance on a {}-point grid settles to {last:.3e} < {tol}", grid.len());
        return Ok(verdict);
    }
    // a grid point whose CDF gap persists along the whole tail
    let tail_rows: Vec<&Vec<f64>> =
        terms.iter().zip(&rows).filter(|((n, _), _)| *n >= from).map(|(_, (_, fx))| fx).collect();
    let mut best: Option<(usize, f64)> = None;
    if min > tol {
        for (k, &fx) in limit_at.iter().enumerate() {
            let gap = tail_rows.iter().map(|row| (row[k] - fx).abs()).fold(f64::INFINITY, f64::min);
            if gap > tol && best.is_none_or(|b| gap > b.1) {
                best = Some((k, gap));
            }
        }
    }
    match best {
        Some((k, gap)) => {
            let x = grid[k];
            verdict.status = Status::Refuted;
            verdict.certificate = format!("CDF gap ≥ {gap:.3e} at x = {x} over n ∈ [{from}, {horizon}]");
            verdict.witness = Some(Witness {
                description: format!("(−∞, {x}]"),
                set: BorelTestSet::interval(Interval::closed(lo - 1.0, x)),
                limit_mass: limit_at[k],
                gap,
            });
        }
        None => {
            verdict.certificate = format!("Lévy distance at n = {horizon} is {last:.3e}; no trend below {tol}");
        }
    }
    Ok(verdict)
}

/// 1024 uniform points on `[lo, hi]` nudged off the limit's atoms, plus points
/// just beside each of those atoms.
fn continuity_grid(limit: &SymbolicMeasure, lo: f64, hi: f64) -> Vec<f64> {
    const POINTS: usize = 1024;
    const NUDGE: f64 = 1e-9;
    let mut atoms: Vec<f64> = Vec::new();
    for c in limit.components() {
        match c {
            MeasureComponent::Atoms(a) => atoms.extend(a.atoms().iter().map(|a| a.0)),
            MeasureComponent::Family(f) => {
                let stop = f.last().unwrap_or(u64::MAX).min(f.first() + 1000);
                atoms.extend((f.first()..=stop).map(|i| f.location(i)));
            }
            _ => {}
        }
    }
    atoms.sort_by(f64::total_cmp);
    let near_atom = |x: f64| {
        let k = atoms.partition_point(|&a| a < x - NUDGE);
        atoms.get(k).is_some_and(|&a| (a - x).abs() <= NUDGE)
    };
    let mut grid = Vec::with_capacity(POINTS + 2 * atoms.len());
    for k in 0..POINTS {
        let mut x = lo + (hi - lo) * k as f64 / (POINTS - 1) as f64;
        if near_atom(x) {
            x += 2.0 * NUDGE;
        }
        grid.push(x);
    }
    for &a in atoms.iter().take(4096) {
        grid.push(a - NUDGE);
        grid.push(a + NUDGE);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Smallest `ε` with `F(x−ε) − ε ≤ G(x) ≤ F(x+ε) + ε` at every grid point,
/// where `G` is given by its values `gx` on the grid.
fn levy_on_grid(f: &SymbolicMeasure, grid: &[f64], gx: &[f64]) -> f64 {
    let ok = |eps: f64| {
        grid.iter().zip(gx).all(|(&x, &g)| f.cdf(x - eps) - eps <= g + 1e-12 && g <= f.cdf(x + eps) + eps + 1e-12)
    };
    if ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

struct Candidate {
    description: String,
    set: BorelTestSet,
}

/// Candidate discriminating sets, coarse structural ones first.
fn candidates(limit: &SymbolicMeasure, terms: &[&SymbolicMeasure]) -> Vec<Vec<Candidate>> {
    let mut structural = Vec::new();
    let mut atom_points: Vec<f64> = Vec::new();
    let mut lattices: Vec<f64> = Vec::new();
    let mut attractors = Vec::new();
    let mut limit_atoms: Vec<f64> = Vec::new();
    for (is_limit, m) in std::iter::once((true, limit)).chain(terms.iter().map(|m| (false, *m))) {
        for c in m.components() {
            match c {
                MeasureComponent::Atoms(a) => {
                    atom_points.extend(a.atoms().iter().map(|a| a.0));
                    if is_limit {
                        limit_atoms.extend(a.atoms().iter().map(|a| a.0));
                    }
                }
                MeasureComponent::Family(f) => {
                    if !lattices.contains(&f.p()) {
                        lattices.push(f.p());
                    }
                    if let Some(n) = f.count().filter(|&n| n <= 100_000) {
                        atom_points.extend((f.first()..f.first() + n).map(|i| f.location(i)));
                    }
                    if is_limit {
                        let stop = f.last().unwrap_or(u64::MAX).min(f.first() + 16);
                        limit_atoms.extend((f.first()..=stop).map(|i| f.location(i)));
                    }
                }
                MeasureComponent::SelfSimilar(s) if !attractors.contains(s.ifs()) => {
                    attractors.push(s.ifs().clone());
                }
                _ => {}
            }
        }
    }
    if !atom_points.is_empty() && atom_points.len() <= 1_000_000 {
        structural.push(Candidate {
            description: format!("every atom of the tail and the limit ({} points)", {
                let mut v = atom_points.clone();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v.len()
            }),
            set: BorelTestSet::skeleton(Skeleton::Points { label: "atoms".into(), points: atom_points }),
        });
    }
    for p in lattices {
        structural.push(Candidate {
            description: format!("the lattice {{i^-{p}}}"),
            set: BorelTestSet::skeleton(Skeleton::PowerLattice { p }),
        });
    }
    for ifs in attractors {
        structural.push(Candidate {
            description: "the attractor of the IFS".into(),
            set: BorelTestSet::skeleton(Skeleton::Attractor(ifs)),
        });
    }
    limit_atoms.sort_by(f64::total_cmp);
    limit_atoms.dedup();
    for &x in limit_atoms.iter().take(1000) {
        structural.push(Candidate { description: format!("{{{x}}}"), set: BorelTestSet::points(vec![x]) });
    }

    let mut cuts: Vec<f64> = Vec::new();
    for m in [limit].into_iter().chain(terms.last().copied()) {
        for c in m.components() {
            match c {
                MeasureComponent::Density(d) => cuts.extend(d.pieces().iter().flat_map(|p| [p.a, p.b])),
                MeasureComponent::Blocks(g) => {
                    let stop = g.last().unwrap_or(u64::MAX).min(g.first() + 64);
                    cuts.extend((g.first()..=stop + 1).map(|i| g.edge(i)));
                }
                _ => {}
            }
            let (a, b) = c.hull();
            cuts.push(a);
            cuts.push(b);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let breakpoints: Vec<Candidate> = cuts
        .windows(2)
        .take(4096)
        .map(|w| Candidate { description: format!("[{}, {}]", w[0], w[1]), set: BorelTestSet::closed(w[0], w[1]) })
        .collect();

    let (lo, hi) = terms
        .iter()
        .filter_map(|m| m.bounds())
        .chain(limit.bounds())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    let mut dyadic = Vec::new();
    if lo.is_finite() && hi > lo {
        for depth in 0..=12u32 {
            let k_max = 1u64 << depth;
            let w = (hi - lo) / k_max as f64;
            for k in 0..k_max {
                let a = lo + w * k as f64;
                let iv = if k + 1 == k_max { Interval::closed(a, hi) } else { Interval::half_open(a, a + w) };
                dyadic.push(Candidate {
                    description: format!("dyadic cell {k}/{k_max} of [{lo}, {hi}]"),
                    set: BorelTestSet::interval(iv),
                });
            }
        }
    }
    vec![structural, breakpoints, dyadic]
}

/// The candidate with the largest persistent gap above `tol`, searching tier by tier.
fn find_witness(limit: &SymbolicMeasure, terms: &[&SymbolicMeasure], tol: f64) -> Option<Witness> {
    if terms.is_empty() {
        return None;
    }
    for tier in candidates(limit, terms) {
        let scored: Vec<Option<(f64, f64)>> = map_slice(Execution::auto(), &tier, |c| {
            let lm = limit.mass(&c.set).ok()?;
            let mut gap = f64::INFINITY;
            for m in terms {
                let tm = m.mass(&c.set).ok()?;
                let g = (tm.value - lm.value).abs() - tm.error - lm.error;
                gap = gap.min(g);
                if gap <= tol {
                    return None;
                }
            }
            Some((gap, lm.value))
        });
        let mut best: Option<(usize, f64, f64)> = None;
        for (k, s) in scored.iter().enumerate() {
            if let Some((gap, lm)) = *s {
                if best.is_none_or(|b| gap > b.1) {
                    best = Some((k, gap, lm));
                }
            }
        }
        if let Some((k, gap, limit_mass)) = best {
            let c = tier.into_iter().nth(k).unwrap();
            return Some(Witness { description: c.description, set: c.set, limit_mass, gap });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{mix, Piece};

    fn leb01() -> SymbolicMeasure {
        SymbolicMeasure::lebesgue(0.0, 1.0).unwrap()
    }

    fn grid_seq() -> MeasureSequence {
        MeasureSequence::new(
            "grid",
            1,
            |n| SymbolicMeasure::atoms((1..=n).map(|i| (i as f64 / n as f64, 1.0 / n as f64)).collect()),
            leb01(),
        )
    }

    #[test]
    fn grid_atoms_converge_weakly_only() {
        let s = grid_seq();
        assert_eq!(weak_converges(&s, 200, 0.02).unwrap().status, Status::Certified);
        let sw = setwise_converges(&s, 50, 0.02).unwrap();
        assert_eq!(sw.status, Status::Refuted);
        let w = sw.witness.unwrap();
        assert!(matches!(w.set.skeleton_ref(), Some(Skeleton::Points { .. })));
        assert_eq!(w.limit_mass, 0.0);
        assert!(w.gap > 0.99);
        assert_eq!(tv_converges(&s, 50, 0.02).unwrap().status, Status::Refuted);
    }

    #[test]
    fn constant_sequence_is_certified() {
        let m = mix(&[0.5, 0.5], &[SymbolicMeasure::dirac(0.25), leb01()]).unwrap();
        let mm = m.clone();
        let s = MeasureSequence::new("const", 1, move |_| Ok(mm.clone()), m);
        for v in [weak_converges(&s, 20, 0.01), setwise_converges(&s, 20, 0.01), tv_converges(&s, 20, 0.01)] {
            let v = v.unwrap();
            assert_eq!(v.status, Status::Certified, "{v:?}");
            assert!(v.series.iter().all(|p| p.1 == 0.0));
        }
    }

    #[test]
    fn scheffe_sequence() {
        // density 1 + (1/n) on [0, 1/2) and 1 − (1/n) on [1/2, 1]: L1 = 1/n
        let s = MeasureSequence::new(
            "scheffe",
            2,
            |n| {
                let e = 1.0 / n as f64;
                SymbolicMeasure::density(vec![
                    Piece { a: 0.0, b: 0.5, height: 1.0 + e },
                    Piece { a: 0.5, b: 1.0, height: 1.0 - e },
                ])
            },
            leb01(),
        );
        let v = setwise_converges(&s, 100, 0.02).unwrap();
        assert_eq!(v.status, Status::Certified);
        let l1 = scheffe_l1(&s.term(10).unwrap(), s.limit()).unwrap();
        assert!((l1 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn shifting_atom_is_refuted_everywhere_but_weakly() {
        let s = MeasureSequence::new(
            "shift",
            1,
            |n| Ok(SymbolicMeasure::dirac(1.0 / n as f64)),
            SymbolicMeasure::dirac(0.0),
        );
        assert_eq!(weak_converges(&s, 200, 0.02).unwrap().status, Status::Certified);
        let v = setwise_converges(&s, 50, 0.02).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert_eq!(v.witness.unwrap().set.points_ref(), &[0.0]);
    }

    #[test]
    fn non_convergent_weak_sequence_is_refuted() {
        let s = MeasureSequence::new("stuck", 1, |_| Ok(SymbolicMeasure::dirac(1.0)), SymbolicMeasure::dirac(0.0));
        let v = weak_converges(&s, 20, 0.02).unwrap();
        assert_eq!(v.status, Status::Refuted);
        assert!(v.witness.unwrap().gap >= 1.0 - 1e-12);
    }

    #[test]
    fn weak_requires_probabilities() {
        let s = MeasureSequence::new("mass2", 1, |_| SymbolicMeasure::lebesgue(0.0, 2.0), leb01());
        assert!(matches!(weak_converges(&s, 5, 0.1), Err(Error::NotProbability(_))));
    }
}
