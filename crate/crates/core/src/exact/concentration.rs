//! Scale-by-scale evidence that a block measure has correlation dimension 0.
//!
//! For the blocks `[a^{(i+1)²}, a^{i²}]` with masses `(1−a)a^i`, the set
//! `Y = [0, a^{n²}]` has mass `a^n`, and for `r = a^{n²}` every ball `B(x, r)`
//! around `x ∈ Y` contains `Y`. Hence `C(r) ≥ μ(Y)² = r^{2/n}`, and the
//! exponent `2/n` tends to 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{BorelTestSet, MeasureComponent, SymbolicMeasure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationStep {
    pub n: u32,
    pub r: f64,
    pub set: BorelTestSet,
    /// `μ(B(0, r))`
    pub ball_mass: f64,
    /// `μ(Y)`
    pub set_mass: f64,
    /// Smallest ball mass over the ends of `Y`; at least `μ(Y)` when `Y ⊂ B(x, r)`.
    pub min_ball_on_set: f64,
    /// `log(μ(B(0, r))·μ(Y)) / log r`
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationCertificate {
    pub a: f64,
    pub steps: Vec<ConcentrationStep>,
    /// Exponents strictly decrease along the schedule.
    pub decreasing: bool,
}

/// Build the certificate for `n = 1..=n_max`, evaluating every mass through the measure.
///
/// `mu` must be the untruncated block measure with ratio `a` and unit mass.
pub fn concentration_certificate(mu: &SymbolicMeasure, a: f64, n_max: u32) -> Result<ConcentrationCertificate> {
    let shape_ok = match mu.components() {
        [MeasureComponent::Blocks(b)] => {
            b.a() == a && b.first() == 0 && b.last().is_none() && (b.scale() - 1.0).abs() <= 1e-12
        }
        _ => false,
    };
    if !shape_ok {
        return Err(Error::WrongShape(format!("expected the unit block measure with a = {a}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidParameters("n_max must be at least 1".into()));
    }
    let mut steps = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let r = a.powf((n as f64) * (n as f64));
        if r < f64::MIN_POSITIVE {
            return Err(Error::InvalidParameters(format!("a^(n²) underflows at n = {n}")));
        }
        let set = BorelTestSet::closed(0.0, r);
        let set_mass = mu.mass(&set)?.value;
        let ball_mass = mu.ball_mass(0.0, r);
        let min_ball_on_set = mu.ball_mass(0.0, r).min(mu.ball_mass(r, r));
        steps.push(ConcentrationStep {
            n,
            r,
            set,
            ball_mass,
            set_mass,
            min_ball_on_set,
            exponent: (ball_mass * set_mass).ln() / r.ln(),
        });
    }
    let decreasing = steps.windows(2).all(|w| w[1].exponent < w[0].exponent);
    Ok(ConcentrationCertificate { a, steps, decreasing })
}
