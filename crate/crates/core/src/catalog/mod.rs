//! The worked example sequences, their expected dimension values and a
//! harness that checks both against the exact and numerical machinery.

mod ledger;
mod ordering;
mod scheffe;
mod semicontinuity;
mod verify;

pub use ledger::{expected, expected_for, Citation, ExpectedLedger, ModeExpectation, Source, TermPattern};
pub use ordering::{class_pairs, ordering_check, OrderingReport};
pub use scheffe::random_scheffe_sequence;
pub use semicontinuity::{
    semicontinuity_check, semicontinuity_check_with, Rule, SemicontinuityReport, SemicontinuityRow, Verdict,
};
pub use verify::{verify_example, Claim, ExampleReport, Tolerances};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{GeometricBlocks, Ifs, MeasureComponent, Piece, SelfSimilar, SymbolicMeasure};
use crate::metrics::{MeasureSequence, Mode};
use crate::mix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    Ex1,
    Ex3,
    Ex4,
    Ex5,
    Ex6,
    Ex7,
    Ex8,
}

impl ExampleName {
    pub const ALL: [ExampleName; 7] = [
        ExampleName::Ex1,
        ExampleName::Ex3,
        ExampleName::Ex4,
        ExampleName::Ex5,
        ExampleName::Ex6,
        ExampleName::Ex7,
        ExampleName::Ex8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Ex1 => "ex1",
            ExampleName::Ex3 => "ex3",
            ExampleName::Ex4 => "ex4",
            ExampleName::Ex5 => "ex5",
            ExampleName::Ex6 => "ex6",
            ExampleName::Ex7 => "ex7",
            ExampleName::Ex8 => "ex8",
        }
    }

    /// One-line description of the sequence.
    pub fn summary(self) -> &'static str {
        match self {
            ExampleName::Ex1 => "n·Leb on [0,1/n] for odd n, point mass at 1/n for even n; limit δ_0",
            ExampleName::Ex3 => "level-n densities Σ|s_ω|^h Leb|X_ω of a self-similar IFS; limit the natural measure",
            ExampleName::Ex4 => "uniform atoms on i/n, i = 1..n; limit Leb on [0,1]",
            ExampleName::Ex5 => "(1/n)δ_0 + Leb on [1/n,1]; limit Leb on [0,1]",
            ExampleName::Ex6 => "((n−1)/n)δ_0 + (1/n)Leb on [1,2]; limit δ_0",
            ExampleName::Ex7 => "normalized blocks [a^{(i+1)²}, a^{i²}], i = 0..n, masses ∝ (1−a)a^i; limit all blocks",
            ExampleName::Ex8 => "Σ_{i≤n} i^{-2} δ_{1/i}; limit the full series",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// An example together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleSpec {
    pub name: ExampleName,
    /// Contraction ratios for `ex3`, laid out evenly on `[0, 1]`.
    pub ratios: Vec<f64>,
    /// Block ratio for `ex7`.
    pub a: f64,
    pub horizon: u64,
}

impl ExampleSpec {
    pub fn new(name: ExampleName) -> Self {
        Self { name, ratios: vec![1.0 / 3.0, 1.0 / 3.0], a: 0.5, horizon: 50 }
    }

    pub fn with_ratios(mut self, ratios: Vec<f64>) -> Self {
        self.ratios = ratios;
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.name {
            ExampleName::Ex3 => {
                self.ifs()?;
                if self.horizon > 64 {
                    return Err(Error::InvalidParameters("ex3 approximants are limited to depth 64".into()));
                }
            }
            ExampleName::Ex7 if !(self.a > 0.0 && self.a < 1.0) => {
                return Err(Error::InvalidParameters(format!("ex7 needs a in (0, 1), got {}", self.a)));
            }
            _ => {}
        }
        if self.horizon < 2 {
            return Err(Error::InvalidParameters("horizon must be at least 2".into()));
        }
        Ok(())
    }

    /// The strongly separated IFS of `ex3`.
    pub fn ifs(&self) -> Result<Ifs> {
        Ifs::evenly_spaced(self.ratios.clone()).map_err(|e| Error::InvalidParameters(e.to_string()))
    }
}

/// `ν_n` of `ex3`: density `|s_ω|^h` on every level-`n` cylinder `X_ω`, taken
/// literally and so of total mass `(Σ r_i^{h+1})^n`.
fn ex3_term(ifs: &Ifs, n: u64) -> Result<SymbolicMeasure> {
    let h = ifs.similarity_dimension();
    let raw: Vec<f64> = ifs.ratios().iter().map(|r| r.powf(h + 1.0)).collect();
    let s: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / s).collect();
    let depth = u32::try_from(n).map_err(|_| Error::InvalidParameters("depth too large".into()))?;
    let part = SelfSimilar::new(ifs.clone(), weights, s.powf(n as f64), Some(depth))?;
    SymbolicMeasure::new(vec![MeasureComponent::SelfSimilar(part)])
}

/// The sequence `ν_n` with its declared limit and convergence mode.
pub fn make_example(spec: &ExampleSpec) -> Result<MeasureSequence> {
    spec.validate()?;
    let name = spec.name.as_str();
    Ok(match spec.name {
        ExampleName::Ex1 => MeasureSequence::new(
            name,
            1,
            |n| {
                let x = 1.0 / n as f64;
                if n % 2 == 1 {
                    SymbolicMeasure::density(vec![Piece { a: 0.0, b: x, height: n as f64 }])
                } else {
                    Ok(SymbolicMeasure::dirac(x))
                }
            },
            SymbolicMeasure::dirac(0.0),
        )
        .with_declared_mode(Mode::Weak),
        ExampleName::Ex3 => {
            let ifs = spec.ifs()?;
            let limit = SymbolicMeasure::natural_self_similar(ifs.clone());
            MeasureSequence::new(name, 1, move |n| ex3_term(&ifs, n), limit).with_declared_mode(Mode::Weak)
        }
        ExampleName::Ex4 => MeasureSequence::new(
            name,
            1,
            |n| {
                let w = 1.0 / n as f64;
                SymbolicMeasure::atoms((1..=n).map(|i| (i as f64 / n as f64, w)).collect())
            },
            SymbolicMeasure::lebesgue(0.0, 1.0)?,
        )
        .with_declared_mode(Mode::Weak),
        ExampleName::Ex5 => MeasureSequence::new(
            name,
            1,
            |n| {
                if n == 1 {
                    return Ok(SymbolicMeasure::dirac(0.0));
                }
                let x = 1.0 / n as f64;
                mix(&[x, 1.0], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(x, 1.0)?])
            },
            SymbolicMeasure::lebesgue(0.0, 1.0)?,
        )
        .with_declared_mode(Mode::Tv),
        ExampleName::Ex6 => MeasureSequence::new(
            name,
            1,
            |n| {
                let x = 1.0 / n as f64;
                let slab = SymbolicMeasure::lebesgue(1.0, 2.0)?;
                if n == 1 {
                    return Ok(slab);
                }
                mix(&[(n - 1) as f64 / n as f64, x], &[SymbolicMeasure::dirac(0.0), slab])
            },
            SymbolicMeasure::dirac(0.0),
        )
        .with_declared_mode(Mode::Tv),
        ExampleName::Ex7 => {
            let a = spec.a;
            MeasureSequence::new(
                name,
                0,
                move |n| {
                    SymbolicMeasure::new(vec![MeasureComponent::Blocks(GeometricBlocks::new(a, 0, Some(n), 1.0)?)])
                },
                SymbolicMeasure::geometric_blocks(a, None)?,
            )
            .with_declared_mode(Mode::Tv)
        }
        ExampleName::Ex8 => MeasureSequence::new(
            name,
            1,
            |n| SymbolicMeasure::atom_family(1.0, 2.0, 1.0, Some(n)),
            SymbolicMeasure::atom_family(1.0, 2.0, 1.0, None)?,
        )
        .with_declared_mode(Mode::Tv),
    })
}
