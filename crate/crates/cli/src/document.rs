//! JSON documents describing symbolic measures.
//!
//! ```json
//! {
//!   "kind": "mixture",
//!   "components": [
//!     { "kind": "atoms", "atoms": [[0.0, 0.5]] },
//!     { "kind": "piecewise", "pieces": [{ "a": 1.0, "b": 2.0, "height": 0.5 }] }
//!   ]
//! }
//! ```
//!
//! Other component kinds are `atom_family` (`p`, `q`, `c`, optional `first`
//! and `n_max`), `self_similar` (`ratios`, `offsets`, optional `weights`,
//! `scale`, `depth`; natural weights when `weights` is absent) and
//! `geometric_blocks` (`a`, optional `first`, `n_max`, `scale`).

use std::fmt;

use dimlab_core::measure::{
    AtomFamily, AtomList, GeometricBlocks, Ifs, MeasureComponent, Piece, PiecewiseDensity, SelfSimilar,
};
use dimlab_core::SymbolicMeasure;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    Mixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDocument {
    pub kind: DocumentKind,
    pub components: Vec<ComponentDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDocument {
    pub a: f64,
    pub b: f64,
    pub height: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn first_index() -> u64 {
    1
}

fn is_first_index(i: &u64) -> bool {
    *i == 1
}

fn is_zero(i: &u64) -> bool {
    *i == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentDocument {
    Atoms {
        atoms: Vec<[f64; 2]>,
    },
    AtomFamily {
        p: f64,
        q: f64,
        c: f64,
        #[serde(default = "first_index", skip_serializing_if = "is_first_index")]
        first: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<u64>,
    },
    Piecewise {
        pieces: Vec<PieceDocument>,
    },
    SelfSimilar {
        ratios: Vec<f64>,
        offsets: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<u32>,
    },
    GeometricBlocks {
        a: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        first: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<u64>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
}

/// A document that failed to parse, with the 1-based position of the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

impl MeasureDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Pretty JSON with a trailing newline; `parse` of the output gives back `self`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn to_measure(&self) -> dimlab_core::Result<SymbolicMeasure> {
        let parts = self.components.iter().map(ComponentDocument::to_component).collect::<dimlab_core::Result<_>>()?;
        SymbolicMeasure::new(parts)
    }

    pub fn from_measure(mu: &SymbolicMeasure) -> Self {
        Self {
            kind: DocumentKind::Mixture,
            components: mu.components().iter().map(ComponentDocument::from_component).collect(),
        }
    }
}

impl ComponentDocument {
    fn to_component(&self) -> dimlab_core::Result<MeasureComponent> {
        Ok(match self {
            ComponentDocument::Atoms { atoms } => {
                MeasureComponent::Atoms(AtomList::new(atoms.iter().map(|&[x, w]| (x, w)).collect())?)
            }
            ComponentDocument::AtomFamily { p, q, c, first, n_max } => {
                MeasureComponent::Family(AtomFamily::new(*p, *q, *c, *first, *n_max)?)
            }
            ComponentDocument::Piecewise { pieces } => MeasureComponent::Density(PiecewiseDensity::new(
                pieces.iter().map(|p| Piece { a: p.a, b: p.b, height: p.height }).collect(),
            )?),
            ComponentDocument::SelfSimilar { ratios, offsets, weights, scale, depth } => {
                let ifs = Ifs::new(ratios.clone(), offsets.clone())?;
                let w = weights.clone().unwrap_or_else(|| ifs.natural_weights());
                MeasureComponent::SelfSimilar(SelfSimilar::new(ifs, w, *scale, *depth)?)
            }
            ComponentDocument::GeometricBlocks { a, first, n_max, scale } => {
                MeasureComponent::Blocks(GeometricBlocks::new(*a, *first, *n_max, *scale)?)
            }
        })
    }

    fn from_component(c: &MeasureComponent) -> Self {
        match c {
            MeasureComponent::Atoms(a) => {
                ComponentDocument::Atoms { atoms: a.atoms().iter().map(|&(x, w)| [x, w]).collect() }
            }
            MeasureComponent::Family(f) => {
                ComponentDocument::AtomFamily { p: f.p(), q: f.q(), c: f.c(), first: f.first(), n_max: f.last() }
            }
            MeasureComponent::Density(d) => ComponentDocument::Piecewise {
                pieces: d.pieces().iter().map(|p| PieceDocument { a: p.a, b: p.b, height: p.height }).collect(),
            },
            MeasureComponent::SelfSimilar(s) => ComponentDocument::SelfSimilar {
                ratios: s.ifs().ratios().to_vec(),
                offsets: s.ifs().offsets().to_vec(),
                weights: (!s.is_natural()).then(|| s.weights().to_vec()),
                scale: s.scale(),
                depth: s.depth(),
            },
            MeasureComponent::Blocks(b) => {
                ComponentDocument::GeometricBlocks { a: b.a(), first: b.first(), n_max: b.last(), scale: b.scale() }
            }
        }
    }
}
