use serde::Serialize;

use super::{ExampleName, ExampleSpec};
use crate::error::Result;
use crate::exact::{bowen_solve, DimensionTable, Entry, Mapping};
use crate::metrics::Mode;

/// Whether an expected value is a stated result or was worked out here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Stated,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Citation {
    pub source: Source,
    pub claim: String,
}

impl Citation {
    pub fn stated(claim: impl Into<String>) -> Self {
        Self { source: Source::Stated, claim: claim.into() }
    }

    pub fn derived(claim: impl Into<String>) -> Self {
        Self { source: Source::Derived, claim: claim.into() }
    }
}

/// Expected tables for the terms `ν_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TermPattern {
    /// The same table for every `n ≥ from`.
    Uniform { from: u64, table: DimensionTable },
    /// Alternating tables by parity of `n`.
    Parity { odd: DimensionTable, even: DimensionTable },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeExpectation {
    pub mode: Mode,
    pub converges: bool,
    pub citation: Citation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedLedger {
    pub name: ExampleName,
    pub terms: TermPattern,
    pub terms_citation: Citation,
    pub limit: DimensionTable,
    pub limit_citation: Citation,
    pub modes: Vec<ModeExpectation>,
}

impl ExpectedLedger {
    /// Expected table for `ν_n`, if the pattern covers `n`.
    pub fn term_table(&self, n: u64) -> Option<&DimensionTable> {
        match &self.terms {
            TermPattern::Uniform { from, table } => (n >= *from).then_some(table),
            TermPattern::Parity { odd, even } => Some(if n % 2 == 1 { odd } else { even }),
        }
    }

    pub fn mode(&self, mode: Mode) -> Option<&ModeExpectation> {
        self.modes.iter().find(|m| m.mode == mode)
    }
}

fn all(v: f64, rule: &str) -> DimensionTable {
    DimensionTable::uniform(v, rule)
}

/// Lower mappings 0, upper mappings 1, both correlation mappings 0.
fn atom_plus_density() -> DimensionTable {
    let mut t = all(0.0, "point mass plus density");
    for m in Mapping::UPPER {
        t.set(m, Entry::Exact(1.0));
    }
    t
}

fn modes(weak: bool, setwise: bool, tv: bool, why: [Citation; 3]) -> Vec<ModeExpectation> {
    let [w, s, t] = why;
    vec![
        ModeExpectation { mode: Mode::Weak, converges: weak, citation: w },
        ModeExpectation { mode: Mode::Setwise, converges: setwise, citation: s },
        ModeExpectation { mode: Mode::Tv, converges: tv, citation: t },
    ]
}

/// Ledger for an example with default parameters.
pub fn expected(name: &str) -> Result<ExpectedLedger> {
    Ok(expected_for(&ExampleSpec::new(name.parse()?)))
}

/// Ledger for a parametrized example.
pub fn expected_for(spec: &ExampleSpec) -> ExpectedLedger {
    let tv_implies = || {
        [
            Citation::derived("TV convergence implies weak convergence"),
            Citation::derived("TV convergence implies setwise convergence"),
        ]
    };
    match spec.name {
        ExampleName::Ex1 => ExpectedLedger {
            name: spec.name,
            terms: TermPattern::Parity { odd: all(1.0, "density"), even: all(0.0, "finite atoms") },
            terms_citation: Citation::stated("every dimension of ν_n is 1 for odd n and 0 for even n"),
            limit: all(0.0, "finite atoms"),
            limit_citation: Citation::derived("the point mass δ_0 has every dimension 0"),
            modes: modes(
                true,
                false,
                false,
                [
                    Citation::stated("ν_n converges weakly to δ_0"),
                    Citation::derived("ν_n({0}) = 0 while δ_0({0}) = 1"),
                    Citation::derived("ν_n({0}) = 0 while δ_0({0}) = 1"),
                ],
            ),
        },
        ExampleName::Ex3 => {
            let r = &spec.ratios;
            let h = if r.iter().all(|x| *x == r[0]) {
                (r.len() as f64).ln() / (1.0 / r[0]).ln()
            } else {
                bowen_solve(r, 1e-15).unwrap_or(f64::NAN)
            };
            ExpectedLedger {
                name: spec.name,
                terms: TermPattern::Uniform { from: 1, table: all(1.0, "self-similar approximant (density)") },
                terms_citation: Citation::stated("each ν_n has a density, so every dimension is 1"),
                limit: all(h, "natural self-similar measure"),
                limit_citation: Citation::stated("every dimension of the natural measure equals the Bowen root h"),
                modes: modes(
                    true,
                    false,
                    false,
                    [
                        Citation::stated("the normalized ν_n converge weakly to the natural measure"),
                        Citation::derived("ν_n charge no mass on the null attractor, which carries the limit"),
                        Citation::derived("densities stay at TV distance 1 from a singular limit"),
                    ],
                ),
            }
        }
        ExampleName::Ex4 => ExpectedLedger {
            name: spec.name,
            terms: TermPattern::Uniform { from: 1, table: all(0.0, "finite atoms") },
            terms_citation: Citation::stated("every dimension of ν_n is 0"),
            limit: all(1.0, "density"),
            limit_citation: Citation::stated("every dimension of the limit is 1"),
            modes: modes(
                true,
                false,
                false,
                [
                    Citation::stated("ν_n converges weakly to Lebesgue measure"),
                    Citation::stated("the convergence is not setwise"),
                    Citation::derived("TV is finer than setwise"),
                ],
            ),
        },
        ExampleName::Ex5 => {
            let [w, s] = tv_implies();
            ExpectedLedger {
                name: spec.name,
                terms: TermPattern::Uniform { from: 2, table: atom_plus_density() },
                terms_citation: Citation::stated("lower dimensions 0, upper dimensions 1, correlation dimensions 0"),
                limit: all(1.0, "density"),
                limit_citation: Citation::stated("every dimension of Lebesgue measure on [0,1] is 1"),
                modes: modes(true, true, true, [w, s, Citation::derived("‖ν_n − Leb[0,1]‖ = 1/n")]),
            }
        }
        ExampleName::Ex6 => {
            let [w, s] = tv_implies();
            ExpectedLedger {
                name: spec.name,
                terms: TermPattern::Uniform { from: 2, table: atom_plus_density() },
                terms_citation: Citation::stated("upper dimensions of ν_n are 1, lower dimensions 0"),
                limit: all(0.0, "finite atoms"),
                limit_citation: Citation::stated("δ_0 has every dimension 0"),
                modes: modes(true, true, true, [w, s, Citation::stated("‖ν_n − δ_0‖ = 1/n")]),
            }
        }
        ExampleName::Ex7 => {
            let [w, s] = tv_implies();
            let limit = all(1.0, "geometric blocks accumulating at 0").with(Mapping::Correlation, Entry::Exact(0.0));
            ExpectedLedger {
                name: spec.name,
                terms: TermPattern::Uniform { from: 0, table: all(1.0, "finite geometric blocks") },
                terms_citation: Citation::stated("every ν_n has a bounded density: correlation dimensions 1"),
                limit,
                limit_citation: Citation::derived(
                    "correlation dimension 0 as stated; modified correlation dimension 1 because sets avoiding 0 \
                     carry mass arbitrarily close to 1 with bounded density; the other mappings are 1",
                ),
                modes: modes(true, true, true, [w, s, Citation::derived("‖ν_n − ν‖ = a^{n+1}")]),
            }
        }
        ExampleName::Ex8 => {
            let [w, s] = tv_implies();
            ExpectedLedger {
                name: spec.name,
                terms: TermPattern::Uniform { from: 1, table: all(0.0, "finite atoms") },
                terms_citation: Citation::stated("each ν_n is finitely atomic, so dim_B^U(ν_n) = 0"),
                limit: all(0.0, "power-law atom family").with(Mapping::BoxUpper, Entry::Exact(0.5)),
                limit_citation: Citation::stated("dim_B^U(ν) = 1/2, the box dimension of {1/i}"),
                modes: modes(true, true, true, [w, s, Citation::derived("‖ν_n − ν‖ = Σ_{i>n} i^{-2}")]),
            }
        }
    }
}

/// Mappings where `a` and `b` differ by more than `tol` (or one is unsupported).
pub(crate) fn table_mismatches(a: &DimensionTable, b: &DimensionTable, tol: f64) -> Vec<Mapping> {
    Mapping::ALL
        .into_iter()
        .filter(|&m| match (a.get(m), b.get(m)) {
            (Entry::Exact(x), Entry::Exact(y)) => !((x - y).abs() <= tol),
            (Entry::Unsupported, Entry::Unsupported) => false,
            _ => true,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_example;
    use crate::exact::exact_dims;

    #[test]
    fn stated_ledgers() {
        let l = expected("ex4").unwrap();
        assert_eq!(l.term_table(3).unwrap().value(Mapping::HausdorffUpper), Some(0.0));
        assert_eq!(l.limit.value(Mapping::BoxLower), Some(1.0));
        assert!(l.mode(Mode::Weak).unwrap().converges);
        assert!(!l.mode(Mode::Setwise).unwrap().converges);

        let l = expected("ex6").unwrap();
        assert_eq!(l.term_table(10).unwrap().value(Mapping::BoxUpper), Some(1.0));
        assert_eq!(l.limit.value(Mapping::HausdorffUpper), Some(0.0));
        assert!(l.mode(Mode::Tv).unwrap().converges);

        let l = expected("ex7").unwrap();
        assert_eq!(l.term_table(4).unwrap().value(Mapping::Correlation), Some(1.0));
        assert_eq!(l.term_table(4).unwrap().value(Mapping::ModCorrelation), Some(1.0));
        assert_eq!(l.limit.value(Mapping::Correlation), Some(0.0));
        assert_eq!(l.limit_citation.source, Source::Derived);

        assert!(expected("ex9").is_err());
    }

    #[test]
    fn rule_tables_agree_with_the_ledger() {
        for name in ExampleName::ALL {
            let spec = ExampleSpec::new(name).with_horizon(12);
            let ledger = expected_for(&spec);
            let seq = make_example(&spec).unwrap();
            for n in seq.first_index()..=12 {
                if let Some(t) = ledger.term_table(n) {
                    let got = exact_dims(&seq.term(n).unwrap());
                    assert!(table_mismatches(&got, t, 1e-12).is_empty(), "{name} n = {n}: {got:?}");
                }
            }
            let got = exact_dims(seq.limit());
            assert!(table_mismatches(&got, &ledger.limit, 1e-12).is_empty(), "{name}: {got:?}");
        }
    }
}
