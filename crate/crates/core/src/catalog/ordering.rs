use serde::Serialize;

use super::{make_example, ExampleSpec};
use crate::error::Result;
use crate::exact::{exact_dims, Mapping};
use crate::measure::{BorelTestSet, SymbolicMeasure};
use crate::metrics::{abs_continuous, equivalent};

/// Comparison of the exact tables of `μ` and `ν` under absolute continuity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub label: String,
    pub abs_continuous: bool,
    pub equivalent: bool,
    /// `(mapping, dim(μ), dim(ν))` for every mapping exact on both sides.
    pub compared: Vec<(&'static str, f64, f64)>,
    /// Mappings breaking `μ ≪ ν ⇒ dim^U(μ) ≤ dim^U(ν)` and `dim^L(μ) ≥ dim^L(ν)`,
    /// or equality when the two are equivalent.
    pub failures: Vec<&'static str>,
}

impl OrderingReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the upper ordering, its lower dual and equality for equivalent
/// measures. Values are compared exactly. Nothing is asserted unless `μ ≪ ν`.
pub fn ordering_check(label: impl Into<String>, mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<OrderingReport> {
    let ac = abs_continuous(mu, nu)?;
    let eq = ac && equivalent(mu, nu)?;
    let (tm, tn) = (exact_dims(mu), exact_dims(nu));
    let mut compared = Vec::new();
    let mut failures = Vec::new();
    for m in Mapping::UPPER.into_iter().chain(Mapping::LOWER) {
        let (Some(a), Some(b)) = (tm.value(m), tn.value(m)) else { continue };
        compared.push((m.label(), a, b));
        let ok = if eq {
            a == b
        } else if !ac {
            true
        } else if m.is_upper() {
            a <= b
        } else {
            a >= b
        };
        if !ok {
            failures.push(m.label());
        }
    }
    Ok(OrderingReport { label: label.into(), abs_continuous: ac, equivalent: eq, compared, failures })
}

/// Pairs `(μ, ν)` with `μ ≪ ν` derived from an example: restrictions of a
/// term or the limit to either half of its hull, normalizations, scalings,
/// and the term against the limit when it is absolutely continuous.
///
/// Restrictions the symbolic class cannot represent are skipped.
pub fn class_pairs(spec: &ExampleSpec) -> Result<Vec<(String, SymbolicMeasure, SymbolicMeasure)>> {
    let seq = make_example(spec)?;
    let first = seq.first_index();
    let mut bases = vec![("limit".to_string(), seq.limit().clone())];
    for n in [first, first + 1, first + 4, spec.horizon.min(first + 10)] {
        bases.push((format!("ν_{n}"), seq.term(n)?));
    }
    bases.dedup_by(|a, b| a.0 == b.0);

    let mut out = Vec::new();
    for (name, m) in &bases {
        if let Some((lo, hi)) = m.bounds() {
            let mid = 0.5 * (lo + hi);
            for (side, set) in [("left", BorelTestSet::closed(lo, mid)), ("right", BorelTestSet::closed(mid, hi))] {
                if let Ok(r) = m.restrict(&set) {
                    if !r.is_zero() {
                        out.push((format!("{}: {name} on {side} half vs {name}", spec.name), r, m.clone()));
                    }
                }
            }
        }
        out.push((format!("{}: normalized {name} vs {name}", spec.name), m.normalize()?, m.clone()));
        out.push((format!("{}: 3·{name} vs {name}", spec.name), m.scaled(3.0)?, m.clone()));
        out.push((format!("{}: {name} vs 0.25·{name}", spec.name), m.clone(), m.scaled(0.25)?));
    }
    for (name, m) in bases.iter().skip(1) {
        if abs_continuous(m, seq.limit())? {
            out.push((format!("{}: {name} vs limit", spec.name), m.clone(), seq.limit().clone()));
        }
    }
    Ok(out)
}
