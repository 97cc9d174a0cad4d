use serde::Serialize;

use crate::exact::{exact_dims, Mapping};
use crate::metrics::{setwise_converges, MeasureSequence, Status};

/// Slack below zero still accepted as a non-negative margin.
pub const MARGIN_SLACK: f64 = 1e-9;

/// Default tolerance for the setwise check that gates the inequalities.
pub const DEFAULT_TOL: f64 = 0.05;

/// Which semicontinuity inequality a row checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `liminf dim^U(ν_n) ≥ dim^U(ν)`, margin `liminf − limit`.
    UpperLsc,
    /// `limsup dim^L(ν_n) ≤ dim^L(ν)`, margin `limit − limsup`.
    LowerUsc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    Holds,
    Violated,
    /// The hypothesis is not met; the reason names what is missing.
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityRow {
    pub mapping: &'static str,
    pub rule: Rule,
    /// Exact values over the tail of the horizon, `None` where unsupported.
    pub values: Vec<(u64, Option<f64>)>,
    pub limit: Option<f64>,
    /// Tail minimum (upper rule) or maximum (lower rule).
    pub proxy: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: Verdict,
    /// For upper rows: when the tail never exceeds the limit, whether the
    /// tail also equals it, as the lower semicontinuity then forces.
    pub equality: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityReport {
    pub sequence: String,
    pub horizon: u64,
    pub tail: (u64, u64),
    pub setwise: Status,
    pub setwise_certificate: String,
    pub rows: Vec<SemicontinuityRow>,
}

impl SemicontinuityReport {
    pub fn row(&self, m: Mapping) -> Option<&SemicontinuityRow> {
        self.rows.iter().find(|r| r.mapping == m.label())
    }

    /// No row is violated and every equality that should hold does.
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Violated && r.equality != Some(false))
    }
}

/// Checks both setwise semicontinuity inequalities on the tail `[⌈h/2⌉, h]`
/// with the default tolerance.
pub fn semicontinuity_check(seq: &MeasureSequence, horizon: u64) -> SemicontinuityReport {
    semicontinuity_check_with(seq, horizon, DEFAULT_TOL)
}

/// As [`semicontinuity_check`] with an explicit setwise tolerance.
///
/// Upper mappings are checked only where the set dimension is countably
/// stable (modified box, Hausdorff, packing); lower mappings are all checked.
/// Unless setwise convergence is certified every row is `NotApplicable`, with
/// the observed margin kept for illustration.
pub fn semicontinuity_check_with(seq: &MeasureSequence, horizon: u64, tol: f64) -> SemicontinuityReport {
    let tail = seq.tail(horizon);
    let (setwise, certificate) = match setwise_converges(seq, horizon, tol) {
        Ok(v) => (v.status, v.certificate),
        Err(e) => (Status::Unknown, format!("setwise check failed: {e}")),
    };
    let tables: Vec<(u64, Option<crate::exact::DimensionTable>)> =
        (tail.0..=tail.1).map(|n| (n, seq.term(n).ok().map(|m| exact_dims(&m)))).collect();
    let limit_table = exact_dims(seq.limit());

    let mut rows = Vec::new();
    for (rule, mappings) in [(Rule::UpperLsc, Mapping::UPPER), (Rule::LowerUsc, Mapping::LOWER)] {
        for m in mappings {
            let values: Vec<(u64, Option<f64>)> =
                tables.iter().map(|(n, t)| (*n, t.as_ref().and_then(|t| t.value(m)))).collect();
            let limit = limit_table.value(m);
            let known: Option<Vec<f64>> = values.iter().map(|v| v.1).collect();
            let proxy = known.as_ref().map(|v| match rule {
                Rule::UpperLsc => v.iter().copied().fold(f64::INFINITY, f64::min),
                Rule::LowerUsc => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
            let margin = match (proxy, limit) {
                (Some(p), Some(l)) => Some(match rule {
                    Rule::UpperLsc => p - l,
                    Rule::LowerUsc => l - p,
                }),
                _ => None,
            };
            let verdict = if rule == Rule::UpperLsc && !m.countably_stable() {
                Verdict::NotApplicable("not countably stable".into())
            } else if setwise != Status::Certified {
                Verdict::NotApplicable("setwise".into())
            } else {
                match margin {
                    None => Verdict::NotApplicable("unsupported".into()),
                    Some(x) if x >= -MARGIN_SLACK => Verdict::Holds,
                    Some(_) => Verdict::Violated,
                }
            };
            let equality = match (&verdict, rule, &known, limit) {
                (Verdict::Holds, Rule::UpperLsc, Some(v), Some(l)) => {
                    let sup = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (sup <= l + MARGIN_SLACK).then(|| v.iter().all(|x| (x - l).abs() <= MARGIN_SLACK))
                }
                _ => None,
            };
            rows.push(SemicontinuityRow { mapping: m.label(), rule, values, limit, proxy, margin, verdict, equality });
        }
    }
    SemicontinuityReport {
        sequence: seq.name().to_string(),
        horizon,
        tail,
        setwise,
        setwise_certificate: certificate,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_example, ExampleName, ExampleSpec};

    fn check(name: ExampleName) -> SemicontinuityReport {
        let spec = ExampleSpec::new(name);
        semicontinuity_check(&make_example(&spec).unwrap(), spec.horizon)
    }

    #[test]
    fn point_mass_sequence_holds() {
        let r = check(ExampleName::Ex6);
        assert_eq!(r.setwise, Status::Certified);
        let h = r.row(Mapping::HausdorffUpper).unwrap();
        assert_eq!((h.proxy, h.limit, h.margin), (Some(1.0), Some(0.0), Some(1.0)));
        assert_eq!(h.verdict, Verdict::Holds);
        let l = r.row(Mapping::HausdorffLower).unwrap();
        assert_eq!((l.proxy, l.limit, l.margin), (Some(0.0), Some(0.0), Some(0.0)));
        assert_eq!(l.verdict, Verdict::Holds);
        assert!(matches!(r.row(Mapping::BoxUpper).unwrap().verdict, Verdict::NotApplicable(_)));
        assert!(r.holds());
    }

    #[test]
    fn weak_only_sequence_is_not_applicable() {
        let r = check(ExampleName::Ex4);
        assert_eq!(r.setwise, Status::Refuted);
        for m in [Mapping::ModBoxUpper, Mapping::HausdorffUpper, Mapping::PackingUpper] {
            let row = r.row(m).unwrap();
            assert_eq!(row.verdict, Verdict::NotApplicable("setwise".into()));
            assert_eq!(row.margin, Some(-1.0));
        }
    }

    #[test]
    fn tv_certified_examples_hold() {
        for name in [ExampleName::Ex5, ExampleName::Ex6, ExampleName::Ex7, ExampleName::Ex8] {
            let r = check(name);
            assert_eq!(r.setwise, Status::Certified, "{name}");
            assert!(r.holds(), "{name}: {r:?}");
            for row in &r.rows {
                if row.verdict == Verdict::Holds {
                    assert!(row.margin.unwrap() >= -MARGIN_SLACK);
                }
            }
        }
    }
}
