//! Exact correlation integral `C(r) = ∫ μ(B(x, r)) dμ(x)` with closed balls.
//!
//! The outer integral is split by component. Densities use the primitive
//! `G(y) = ∫_{−∞}^y F`: a piece of height `h` on `[a, b]` contributes
//! `h·[G(b+r) − G(a+r) − G(b−r) + G(a−r)]`. Atoms use exact ball masses.
//! Whatever cannot be enumerated (family tails, blocks near 0, deep
//! self-similar cylinders) is bracketed: for `x ∈ [lo, hi]`,
//! `F(lo+r) − F(hi−r⁻) ≤ μ(B(x, r)) ≤ F(hi+r) − F(lo−r⁻)`.

use crate::certified::Certified;
use crate::error::{Error, Result};
use crate::measure::{AtomFamily, GeometricBlocks, MeasureComponent, SelfSimilar, SymbolicMeasure};
use crate::par::{map_range, Execution};

/// Largest number of family atoms enumerated one by one.
const FAMILY_CAP: u64 = 1 << 22;
/// Stop refining a self-similar cylinder once its bracket contributes at most
/// this much error, relative to `μ(X)·scale`.
const CELL_ERROR: f64 = 1e-16;
const CELL_LEVEL: u32 = 60;
const CELL_BUDGET: usize = 1 << 21;

pub fn correlation_integral_exact(mu: &SymbolicMeasure, r: f64) -> Result<Certified> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameters(format!("radius {r} must be positive")));
    }
    let mut total = Certified::ZERO;
    for c in mu.components() {
        total += match c {
            MeasureComponent::Atoms(a) => a.atoms().iter().map(|&(x, w)| mu.ball_mass_certified(x, r) * w).sum(),
            MeasureComponent::Family(f) => family_term(mu, f, r),
            MeasureComponent::Density(d) => d.pieces().iter().map(|p| piece_term(mu, p.a, p.b, p.height, r)).sum(),
            MeasureComponent::Blocks(b) => blocks_term(mu, b, r),
            MeasureComponent::SelfSimilar(s) => self_similar_term(mu, s, r),
        };
    }
    Ok(total.non_negative())
}

/// A uniform piece of height `h` on `[a, b]`. Very short tall pieces amplify the
/// rounding in `G`; for those the bracket over the piece is tighter.
fn piece_term(mu: &SymbolicMeasure, a: f64, b: f64, h: f64, r: f64) -> Certified {
    let g = |y: f64| mu.primitive(y);
    let exact = (g(b + r) - g(a + r) - g(b - r) + g(a - r)) * h;
    if exact.error <= 1e-15 * exact.value.abs() {
        return exact;
    }
    let coarse = cell(mu, a, b, Certified::exact(h * (b - a)), r);
    if coarse.error < exact.error {
        coarse
    } else {
        exact
    }
}

/// Range of `μ(B(x, r))` over `x ∈ [lo, hi]`.
fn bracket(mu: &SymbolicMeasure, lo: f64, hi: f64, r: f64) -> (f64, f64) {
    let low = mu.cdf_certified(lo + r).lower() - mu.cdf_left_certified(hi - r).upper();
    let high = mu.cdf_certified(hi + r).upper() - mu.cdf_left_certified(lo - r).lower();
    (low.max(0.0), high.max(0.0))
}

/// `mass · μ(B(x, r))` for a cell of mass carried on `[lo, hi]`.
fn cell(mu: &SymbolicMeasure, lo: f64, hi: f64, mass: Certified, r: f64) -> Certified {
    let (b0, b1) = bracket(mu, lo, hi, r);
    Certified::between(mass.lower().max(0.0) * b0, mass.upper() * b1)
}

fn family_atoms(mu: &SymbolicMeasure, f: &AtomFamily, from: u64, to: u64, r: f64) -> Certified {
    const CHUNK: u64 = 1 << 14;
    let chunks = (to - from).div_ceil(CHUNK) as usize;
    map_range(Execution::auto(), 0..chunks, |k| {
        let lo = from + k as u64 * CHUNK;
        let hi = (lo + CHUNK).min(to);
        (lo..hi).map(|i| mu.ball_mass_certified(f.location(i), r) * f.weight(i)).sum::<Certified>()
    })
    .into_iter()
    .sum()
}

fn family_term(mu: &SymbolicMeasure, f: &AtomFamily, r: f64) -> Certified {
    if let Some(n) = f.count().filter(|&n| n <= FAMILY_CAP) {
        return family_atoms(mu, f, f.first(), f.first() + n, r);
    }
    let mut done = f.first();
    let mut head = Certified::ZERO;
    let mut upto = f.first() + 4096;
    loop {
        head += family_atoms(mu, f, done, upto, r);
        done = upto;
        // atoms past `done` all lie in (0, loc(done)]
        let tail = cell(mu, 0.0, f.location(done), f.mass_from(done), r);
        if tail.error < 1e-13 || upto - f.first() >= FAMILY_CAP {
            return head + tail;
        }
        upto = f.first() + 2 * (upto - f.first());
    }
}

fn blocks_term(mu: &SymbolicMeasure, b: &GeometricBlocks, r: f64) -> Certified {
    let mut acc = Certified::ZERO;
    let mut i = b.first();
    loop {
        if !b.in_range(i) {
            return acc;
        }
        let (lo, hi) = b.block(i);
        let rest = b.tail_mass(i);
        if b.last().is_none() && (hi <= 1e-12 * r || rest <= 1e-17 * b.scale() || lo == 0.0) {
            return acc + cell(mu, 0.0, hi, Certified::exact(rest), r);
        }
        acc += piece_term(mu, lo, hi, b.block_mass(i) / (hi - lo), r);
        i += 1;
    }
}

fn self_similar_term(mu: &SymbolicMeasure, s: &SelfSimilar, r: f64) -> Certified {
    let ratios = s.ifs().ratios();
    let offsets = s.ifs().offsets();
    let mut acc = Certified::ZERO;
    let mut stack = vec![(0.0f64, 1.0f64, s.scale(), 0u32)];
    let budget = CELL_ERROR * mu.total_mass() * s.scale();
    let mut visited = 0usize;
    while let Some((lo, len, mass, level)) = stack.pop() {
        visited += 1;
        if s.depth() == Some(level) {
            acc += piece_term(mu, lo, lo + len, mass / len, r);
            continue;
        }
        let (b0, b1) = bracket(mu, lo, lo + len, r);
        if mass * (b1 - b0) <= budget || level >= CELL_LEVEL || visited + stack.len() >= CELL_BUDGET {
            acc += Certified::between(mass * b0, mass * b1);
            continue;
        }
        for i in (0..ratios.len()).rev() {
            stack.push((lo + len * offsets[i], len * ratios[i], mass * s.weights()[i], level + 1));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{mix, Ifs, Piece};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(mu: &SymbolicMeasure, r: f64) -> Certified {
        correlation_integral_exact(mu, r).unwrap()
    }

    #[test]
    fn uniform_closed_form() {
        let u = SymbolicMeasure::lebesgue(0.0, 1.0).unwrap();
        for r in [1e-6, 1e-3, 0.1, 0.5, 0.99] {
            assert_abs_diff_eq!(c(&u, r).value, 2.0 * r - r * r, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(c(&u, 3.0).value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn point_mass() {
        for r in [1e-9, 0.5, 10.0] {
            assert_eq!(c(&SymbolicMeasure::dirac(0.0), r).value, 1.0);
        }
    }

    #[test]
    fn atom_at_zero_plus_slab() {
        // 0.1 δ_0 + 𝔏¹ on [0.1, 1]: 0.01 + (2r·0.9 − r²) while r < 0.1
        let nu =
            mix(&[0.1, 1.0], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(0.1, 1.0).unwrap()]).unwrap();
        assert_abs_diff_eq!(c(&nu, 0.01).value, 0.01 + 0.018 - 1e-4, epsilon = 1e-14);
        // once r > 0.1 the atom sees [0.1, r] on both sides of the pair
        let r = 0.3;
        let expected = 0.01 + 2.0 * 0.1 * (r - 0.1) + (2.0 * r * 0.9 - r * r);
        assert_abs_diff_eq!(c(&nu, r).value, expected, epsilon = 1e-14);
    }

    #[test]
    fn atom_plus_far_slab() {
        let nu =
            mix(&[0.9, 0.1], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(1.0, 2.0).unwrap()]).unwrap();
        for r in [1e-4, 0.05, 0.5] {
            assert_abs_diff_eq!(c(&nu, r).value, 0.81 + 0.01 * (2.0 * r - r * r), epsilon = 1e-14);
        }
    }

    #[test]
    fn finite_blocks_match_their_pieces() {
        let b = SymbolicMeasure::geometric_blocks(0.5, Some(3)).unwrap();
        let g = match &b.components()[0] {
            MeasureComponent::Blocks(g) => g.clone(),
            _ => unreachable!(),
        };
        let pieces: Vec<Piece> = (0..=3)
            .map(|i| {
                let (lo, hi) = g.block(i);
                Piece { a: lo, b: hi, height: g.block_mass(i) / (hi - lo) }
            })
            .collect();
        let d = SymbolicMeasure::density(pieces).unwrap();
        for r in [1e-5, 1e-3, 0.02, 0.3] {
            assert_abs_diff_eq!(c(&b, r).value, c(&d, r).value, epsilon = 1e-13);
        }
    }

    #[test]
    fn infinite_blocks_certified() {
        let nu = SymbolicMeasure::geometric_blocks(0.5, None).unwrap();
        for n in 1..5u32 {
            let r = 0.5f64.powi((n * n) as i32);
            let v = c(&nu, r);
            assert!(v.error < 1e-9, "{v:?}");
            // every x ∈ [0, r] sees all of [0, r]
            assert!(v.value >= 0.5f64.powi(2 * n as i32) - 1e-12);
        }
    }

    #[test]
    fn cantor_self_similarity() {
        let cantor = SymbolicMeasure::natural_self_similar(Ifs::evenly_spaced(vec![1.0 / 3.0; 2]).unwrap());
        assert_abs_diff_eq!(c(&cantor, 1.0).value, 1.0, epsilon = 1e-12);
        // below the middle gap the two halves never meet: C(r/3) = C(r)/2
        for r in [0.3, 0.2, 0.05] {
            let a = c(&cantor, r);
            let b = c(&cantor, r / 3.0);
            assert!(a.error < 1e-9 && b.error < 1e-9, "{a:?} {b:?}");
            assert_abs_diff_eq!(b.value, a.value / 2.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn approximant_matches_pieces() {
        let ifs = Ifs::evenly_spaced(vec![0.25, 0.5]).unwrap();
        let s = SymbolicMeasure::new(vec![MeasureComponent::SelfSimilar(
            SelfSimilar::new(ifs.clone(), vec![0.4, 0.6], 1.0, Some(2)).unwrap(),
        )])
        .unwrap();
        let mut pieces = Vec::new();
        let (r, o) = (ifs.ratios(), ifs.offsets());
        for i in 0..2 {
            for j in 0..2 {
                let w = [0.4, 0.6][i] * [0.4, 0.6][j];
                let lo = o[i] + r[i] * o[j];
                let len = r[i] * r[j];
                pieces.push(Piece { a: lo, b: lo + len, height: w / len });
            }
        }
        let d = SymbolicMeasure::density(pieces).unwrap();
        for rad in [1e-3, 0.05, 0.2] {
            assert_abs_diff_eq!(c(&s, rad).value, c(&d, rad).value, epsilon = 1e-12);
        }
    }

    #[test]
    fn family_versus_enumeration() {
        let fam = SymbolicMeasure::atom_family(1.0, 2.0, 1.0, Some(300)).unwrap();
        let list =
            SymbolicMeasure::atoms((1..=300u64).map(|i| (1.0 / i as f64, 1.0 / (i * i) as f64)).collect()).unwrap();
        for r in [1e-4, 3e-3, 0.1] {
            assert_abs_diff_eq!(c(&fam, r).value, c(&list, r).value, epsilon = 1e-13);
        }
    }

    #[test]
    fn infinite_family_brackets() {
        let fam = SymbolicMeasure::atom_family(1.0, 2.0, 1.0, None).unwrap();
        let total = fam.total_mass();
        let v = c(&fam, 0.01);
        assert!(v.error < 1e-9, "{v:?}");
        // squared weights bound it from below, squared mass from above
        let sq: f64 = (1..200_000u64).map(|i| (i as f64).powi(-4)).sum();
        assert!(v.value > sq && v.value < total * total);
        assert_abs_diff_eq!(c(&fam, 2.0).value, total * total, epsilon = 1e-12);
    }

    fn small_measure() -> impl Strategy<Value = SymbolicMeasure> {
        (
            prop::collection::vec((-1.0..2.0f64, 0.01..1.0f64), 0..4),
            prop::collection::vec((-1.0..2.0f64, 0.01..1.0f64, 0.1..3.0f64), 0..3),
        )
            .prop_filter_map("nonzero", |(atoms, slabs)| {
                let mut parts = vec![];
                if !atoms.is_empty() {
                    parts.push(SymbolicMeasure::atoms(atoms).ok()?);
                }
                if !slabs.is_empty() {
                    let pieces: Vec<Piece> =
                        slabs.into_iter().map(|(a, l, h)| Piece { a, b: a + l, height: h }).collect();
                    parts.push(
                        SymbolicMeasure::new(vec![MeasureComponent::Density(
                            crate::measure::PiecewiseDensity::superpose(&pieces).ok()?,
                        )])
                        .ok()?,
                    );
                }
                if parts.is_empty() {
                    return None;
                }
                mix(&vec![1.0; parts.len()], &parts).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn monotone_with_limits(mu in small_measure(), r1 in 1e-6..1.0f64, r2 in 1e-6..1.0f64) {
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(c(&mu, lo).value <= c(&mu, hi).value + 1e-12);
            let m = mu.total_mass();
            prop_assert!((c(&mu, 10.0).value - m * m).abs() < 1e-12 * m * m.max(1.0));
            // vanishing radius leaves the atom self-pairs
            let sq: f64 = mu.components().iter().map(|c| match c {
                MeasureComponent::Atoms(a) => a.atoms().iter().map(|p| p.1 * p.1).sum(),
                _ => 0.0,
            }).sum();
            prop_assert!((c(&mu, 1e-13).value - sq).abs() < 1e-9);
        }
    }
}
