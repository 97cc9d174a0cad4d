use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{Piece, SymbolicMeasure};
use crate::metrics::{MeasureSequence, Mode};

/// Random probability densities `f_n → f` on `[0, 1]` with `‖f_n − f‖₁ ≤ 2^{-n}`.
///
/// `f` is piecewise constant with 2 to 8 pieces; `f_n = f + ε_n g` where
/// `g = 1` on `[0, c]` and `−c/(1−c)` on `(c, 1]`, so `∫g = 0`. The step
/// `ε_n` keeps `f_n ≥ f_min/2`, and `‖ε_n g‖₁ = 2cε_n ≤ 2^{-n}`.
pub fn random_scheffe_sequence(seed: u64) -> MeasureSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(2..=8usize);
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.05..0.95)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(1.0);
    let raw: Vec<f64> = (0..edges.len() - 1).map(|_| rng.random_range(0.5..2.0)).collect();
    let mass: f64 = edges.windows(2).zip(&raw).map(|(e, h)| (e[1] - e[0]) * h).sum();
    let base: Vec<Piece> =
        edges.windows(2).zip(&raw).map(|(e, h)| Piece { a: e[0], b: e[1], height: h / mass }).collect();
    let c: f64 = rng.random_range(0.2..0.8);
    let low = c / (1.0 - c);
    let min_h = base.iter().map(|p| p.height).fold(f64::INFINITY, f64::min);
    let step0 = min_h / (2.0 * low.max(1.0));

    let limit = SymbolicMeasure::density(base.clone()).expect("valid random density");
    MeasureSequence::new(
        format!("scheffe-{seed}"),
        1,
        move |n| {
            let eps = step0 * 0.5f64.powi(n.min(1100) as i32);
            SymbolicMeasure::density(perturbed(&base, c, eps, low))
        },
        limit,
    )
    .with_declared_mode(Mode::Setwise)
}

fn perturbed(base: &[Piece], c: f64, eps: f64, low: f64) -> Vec<Piece> {
    let mut out = Vec::with_capacity(base.len() + 1);
    for p in base {
        let parts = if p.a < c && c < p.b { vec![(p.a, c), (c, p.b)] } else { vec![(p.a, p.b)] };
        for (a, b) in parts {
            let shift = if b <= c { eps } else { -eps * low };
            out.push(Piece { a, b, height: p.height + shift });
        }
    }
    out
}
