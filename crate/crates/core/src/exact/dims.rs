//! Rule table of exact dimension values for the symbolic class.

use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::measure::{MeasureComponent, SelfSimilar, SymbolicMeasure};

/// The ten measure-dimension mappings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mapping {
    BoxLower,
    BoxUpper,
    ModBoxLower,
    ModBoxUpper,
    HausdorffLower,
    HausdorffUpper,
    PackingLower,
    PackingUpper,
    Correlation,
    ModCorrelation,
}

impl Mapping {
    pub const ALL: [Mapping; 10] = [
        Mapping::BoxLower,
        Mapping::BoxUpper,
        Mapping::ModBoxLower,
        Mapping::ModBoxUpper,
        Mapping::HausdorffLower,
        Mapping::HausdorffUpper,
        Mapping::PackingLower,
        Mapping::PackingUpper,
        Mapping::Correlation,
        Mapping::ModCorrelation,
    ];

    pub const LOWER: [Mapping; 4] =
        [Mapping::BoxLower, Mapping::ModBoxLower, Mapping::HausdorffLower, Mapping::PackingLower];
    pub const UPPER: [Mapping; 4] =
        [Mapping::BoxUpper, Mapping::ModBoxUpper, Mapping::HausdorffUpper, Mapping::PackingUpper];

    pub fn label(self) -> &'static str {
        match self {
            Mapping::BoxLower => "dim_B^L",
            Mapping::BoxUpper => "dim_B^U",
            Mapping::ModBoxLower => "dim_MB^L",
            Mapping::ModBoxUpper => "dim_MB^U",
            Mapping::HausdorffLower => "dim_H^L",
            Mapping::HausdorffUpper => "dim_H^U",
            Mapping::PackingLower => "dim_P^L",
            Mapping::PackingUpper => "dim_P^U",
            Mapping::Correlation => "dim_C",
            Mapping::ModCorrelation => "dim_MC",
        }
    }

    pub fn from_label(s: &str) -> Option<Mapping> {
        Mapping::ALL.into_iter().find(|m| m.label() == s)
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn is_lower(self) -> bool {
        Mapping::LOWER.contains(&self)
    }

    pub fn is_upper(self) -> bool {
        Mapping::UPPER.contains(&self)
    }

    /// Whether the underlying set dimension is countably stable.
    pub fn countably_stable(self) -> bool {
        !matches!(self, Mapping::BoxLower | Mapping::BoxUpper | Mapping::Correlation | Mapping::ModCorrelation)
    }

    /// The other member of a lower/upper pair.
    pub fn partner(self) -> Option<Mapping> {
        Some(match self {
            Mapping::BoxLower => Mapping::BoxUpper,
            Mapping::BoxUpper => Mapping::BoxLower,
            Mapping::ModBoxLower => Mapping::ModBoxUpper,
            Mapping::ModBoxUpper => Mapping::ModBoxLower,
            Mapping::HausdorffLower => Mapping::HausdorffUpper,
            Mapping::HausdorffUpper => Mapping::HausdorffLower,
            Mapping::PackingLower => Mapping::PackingUpper,
            Mapping::PackingUpper => Mapping::PackingLower,
            _ => return None,
        })
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entry {
    Exact(f64),
    Unsupported,
}

impl Entry {
    pub fn value(self) -> Option<f64> {
        match self {
            Entry::Exact(v) => Some(v),
            Entry::Unsupported => None,
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Entry::Exact(v) => s.serialize_f64(*v),
            Entry::Unsupported => s.serialize_str("unsupported"),
        }
    }
}

/// Values of all ten mappings for one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionTable {
    entries: [Entry; 10],
    /// Which rule produced the table.
    pub rule: String,
}

impl Serialize for DimensionTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(11))?;
        map.serialize_entry("rule", &self.rule)?;
        for m in Mapping::ALL {
            map.serialize_entry(m.label(), &self.entries[m.index()])?;
        }
        map.end()
    }
}

impl DimensionTable {
    pub fn uniform(value: f64, rule: impl Into<String>) -> Self {
        Self { entries: [Entry::Exact(value); 10], rule: rule.into() }
    }

    pub fn unsupported(rule: impl Into<String>) -> Self {
        Self { entries: [Entry::Unsupported; 10], rule: rule.into() }
    }

    pub fn get(&self, m: Mapping) -> Entry {
        self.entries[m.index()]
    }

    pub fn value(&self, m: Mapping) -> Option<f64> {
        self.get(m).value()
    }

    pub fn set(&mut self, m: Mapping, e: Entry) {
        self.entries[m.index()] = e;
    }

    pub fn with(mut self, m: Mapping, e: Entry) -> Self {
        self.set(m, e);
        self
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, Entry::Exact(_)))
    }

    /// Violations of `dim^L ≤ dim^U` and `dim_C ≤ dim_MC` among exact entries.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (lo, hi) in Mapping::LOWER.into_iter().zip(Mapping::UPPER) {
            if let (Some(a), Some(b)) = (self.value(lo), self.value(hi)) {
                if a > b + 1e-12 {
                    out.push(format!("{lo} = {a} exceeds {hi} = {b}"));
                }
            }
        }
        if let (Some(c), Some(mc)) = (self.value(Mapping::Correlation), self.value(Mapping::ModCorrelation)) {
            if c > mc + 1e-12 {
                out.push(format!("dim_C = {c} exceeds dim_MC = {mc}"));
            }
        }
        out
    }

    /// Whether `dim_H^L ≤ dim_C` holds (`None` when either entry is unsupported).
    ///
    /// This is not an invariant of the class: block measures accumulating at a
    /// point and self-similar measures with non-natural weights both have
    /// `dim_C < dim_H^L`.
    pub fn hausdorff_below_correlation(&self) -> Option<bool> {
        Some(self.value(Mapping::HausdorffLower)? <= self.value(Mapping::Correlation)? + 1e-12)
    }
}

/// Per-component table, or `None` when no rule covers the component.
fn part_table(c: &MeasureComponent) -> DimensionTable {
    match c {
        MeasureComponent::Atoms(_) => DimensionTable::uniform(0.0, "finite atoms"),
        MeasureComponent::Family(f) => {
            if f.is_truncated() {
                DimensionTable::uniform(0.0, "finite atoms")
            } else {
                // the closure of {i^-p} has box dimension 1/(1+p); any full-mass set contains every atom
                DimensionTable::uniform(0.0, "power-law atom family")
                    .with(Mapping::BoxUpper, Entry::Exact(1.0 / (1.0 + f.p())))
            }
        }
        MeasureComponent::Density(_) => DimensionTable::uniform(1.0, "density"),
        MeasureComponent::Blocks(b) => {
            if b.last().is_some() {
                DimensionTable::uniform(1.0, "finite geometric blocks")
            } else {
                // every x ∈ Y_r = [0, a^{n²}] sees ν(Y_r) = a^n inside B(x, r), so C(r) ≥ a^{2n} = r^{2/n}
                // while sets avoiding a neighbourhood of 0 keep bounded density
                DimensionTable::uniform(1.0, "geometric blocks accumulating at 0")
                    .with(Mapping::Correlation, Entry::Exact(0.0))
            }
        }
        MeasureComponent::SelfSimilar(s) => self_similar_table(s),
    }
}

fn self_similar_table(s: &SelfSimilar) -> DimensionTable {
    if s.depth().is_some() {
        return DimensionTable::uniform(1.0, "self-similar approximant (density)");
    }
    let h = s.ifs().similarity_dimension();
    if s.is_natural() {
        return DimensionTable::uniform(h, "natural self-similar measure");
    }
    let (p, r) = (s.weights(), s.ifs().ratios());
    let entropy: f64 = -p.iter().map(|p| p * p.ln()).sum::<f64>();
    let lyapunov: f64 = -p.iter().zip(r).map(|(p, r)| p * r.ln()).sum::<f64>();
    let exact_dim = entropy / lyapunov;
    let mut t = DimensionTable::unsupported("self-similar measure with non-natural weights");
    for m in [Mapping::HausdorffLower, Mapping::HausdorffUpper, Mapping::PackingLower, Mapping::PackingUpper] {
        t.set(m, Entry::Exact(exact_dim));
    }
    t.set(Mapping::Correlation, Entry::Exact(correlation_exponent(p, r)));
    t
}

/// Root `τ` of `Σ p_i² r_i^{-τ} = 1`.
fn correlation_exponent(p: &[f64], r: &[f64]) -> f64 {
    let f = |t: f64| p.iter().zip(r).map(|(p, r)| p * p * r.powf(-t)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Exact dimension table from per-class rules.
///
/// A sum of parts takes the minimum over parts for lower mappings and for
/// both correlation mappings, and the maximum for upper mappings. An entry
/// is `Unsupported` if it is unsupported for any part.
pub fn exact_dims(mu: &SymbolicMeasure) -> DimensionTable {
    let parts: Vec<DimensionTable> = mu.components().iter().map(part_table).collect();
    match parts.len() {
        0 => DimensionTable::unsupported("zero measure"),
        1 => parts.into_iter().next().unwrap(),
        _ => {
            let mut t = DimensionTable::unsupported(format!(
                "sum of parts: {}",
                parts.iter().map(|p| p.rule.as_str()).collect::<Vec<_>>().join(" + ")
            ));
            for m in Mapping::ALL {
                let vals: Option<Vec<f64>> = parts.iter().map(|p| p.value(m)).collect();
                if let Some(v) = vals {
                    let x = if m.is_upper() {
                        v.into_iter().fold(f64::NEG_INFINITY, f64::max)
                    } else {
                        v.into_iter().fold(f64::INFINITY, f64::min)
                    };
                    t.set(m, Entry::Exact(x));
                }
            }
            t
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{mix, Ifs, Piece};
    use approx::assert_abs_diff_eq;

    fn all(t: &DimensionTable, v: f64) -> bool {
        Mapping::ALL.iter().all(|&m| t.value(m) == Some(v))
    }

    #[test]
    fn basic_classes() {
        assert!(all(&exact_dims(&SymbolicMeasure::dirac(0.0)), 0.0));
        assert!(all(&exact_dims(&SymbolicMeasure::lebesgue(0.0, 1.0).unwrap()), 1.0));
        let cantor = SymbolicMeasure::natural_self_similar(Ifs::evenly_spaced(vec![1.0 / 3.0; 2]).unwrap());
        let t = exact_dims(&cantor);
        for m in Mapping::ALL {
            assert_abs_diff_eq!(t.value(m).unwrap(), 2f64.ln() / 3f64.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn atom_family() {
        let t = exact_dims(&SymbolicMeasure::atom_family(1.0, 2.0, 1.0, None).unwrap());
        assert_eq!(t.value(Mapping::BoxUpper), Some(0.5));
        for m in Mapping::ALL.into_iter().filter(|&m| m != Mapping::BoxUpper) {
            assert_eq!(t.value(m), Some(0.0), "{m}");
        }
        let t = exact_dims(&SymbolicMeasure::atom_family(1.0, 2.0, 1.0, Some(40)).unwrap());
        assert!(all(&t, 0.0));
    }

    #[test]
    fn atom_plus_density() {
        let nu =
            mix(&[0.9, 0.1], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(1.0, 2.0).unwrap()]).unwrap();
        let t = exact_dims(&nu);
        for m in Mapping::LOWER {
            assert_eq!(t.value(m), Some(0.0));
        }
        for m in Mapping::UPPER {
            assert_eq!(t.value(m), Some(1.0));
        }
        assert_eq!(t.value(Mapping::Correlation), Some(0.0));
        assert_eq!(t.value(Mapping::ModCorrelation), Some(0.0));
        assert!(t.violations().is_empty());
    }

    #[test]
    fn geometric_blocks() {
        let t = exact_dims(&SymbolicMeasure::geometric_blocks(0.5, Some(4)).unwrap());
        assert!(all(&t, 1.0));
        let t = exact_dims(&SymbolicMeasure::geometric_blocks(0.5, None).unwrap());
        assert_eq!(t.value(Mapping::Correlation), Some(0.0));
        assert_eq!(t.value(Mapping::ModCorrelation), Some(1.0));
        assert_eq!(t.value(Mapping::HausdorffLower), Some(1.0));
        assert!(t.violations().is_empty());
        // lower Hausdorff dimension sits above the correlation dimension here
        assert_eq!(t.hausdorff_below_correlation(), Some(false));
    }

    #[test]
    fn non_natural_weights() {
        let ifs = Ifs::evenly_spaced(vec![1.0 / 3.0; 2]).unwrap();
        let s = SymbolicMeasure::self_similar(ifs, vec![0.25, 0.75]).unwrap();
        let t = exact_dims(&s);
        let ent = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert_abs_diff_eq!(t.value(Mapping::HausdorffLower).unwrap(), ent / 3f64.ln(), epsilon = 1e-12);
        // Σ p² 3^τ = 1
        let tau = -(0.0625f64 + 0.5625).ln() / 3f64.ln();
        assert_abs_diff_eq!(t.value(Mapping::Correlation).unwrap(), tau, epsilon = 1e-12);
        assert_eq!(t.get(Mapping::BoxUpper), Entry::Unsupported);
        assert_eq!(t.hausdorff_below_correlation(), Some(false));
    }

    #[test]
    fn mixture_with_unsupported_part() {
        let ifs = Ifs::evenly_spaced(vec![1.0 / 3.0; 2]).unwrap();
        let s = SymbolicMeasure::self_similar(ifs, vec![0.25, 0.75]).unwrap();
        let m = mix(&[0.5, 0.5], &[s, SymbolicMeasure::dirac(2.0)]).unwrap();
        let t = exact_dims(&m);
        assert_eq!(t.get(Mapping::BoxUpper), Entry::Unsupported);
        assert_eq!(t.value(Mapping::HausdorffLower), Some(0.0));
    }

    #[test]
    fn zero_measure_is_unsupported() {
        assert!(Mapping::ALL.iter().all(|&m| exact_dims(&SymbolicMeasure::zero()).get(m) == Entry::Unsupported));
    }

    #[test]
    fn invariants_over_the_class() {
        let cantor = Ifs::evenly_spaced(vec![1.0 / 3.0; 2]).unwrap();
        let measures = vec![
            SymbolicMeasure::dirac(0.3),
            SymbolicMeasure::density(vec![Piece { a: 0.0, b: 0.5, height: 2.0 }]).unwrap(),
            SymbolicMeasure::atom_family(2.0, 3.0, 1.0, None).unwrap(),
            SymbolicMeasure::natural_self_similar(cantor.clone()),
            SymbolicMeasure::self_similar(cantor, vec![0.3, 0.7]).unwrap(),
            mix(&[0.1, 0.9], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(0.1, 1.0).unwrap()]).unwrap(),
            SymbolicMeasure::geometric_blocks(0.3, Some(5)).unwrap(),
            SymbolicMeasure::geometric_blocks(0.3, None).unwrap(),
        ];
        for m in &measures {
            let t = exact_dims(m);
            assert!(t.violations().is_empty(), "{t:?}");
            let (h, c) = (t.value(Mapping::HausdorffLower).unwrap(), t.value(Mapping::Correlation).unwrap());
            assert!(c <= h + 1e-12, "{t:?}");
        }
    }

    #[test]
    fn serializes_by_label() {
        let s = serde_json::to_string(&exact_dims(&SymbolicMeasure::dirac(0.0))).unwrap();
        assert!(s.starts_with(r#"{"rule":"finite atoms","dim_B^L":0.0"#), "{s}");
    }
}
