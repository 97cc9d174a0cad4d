use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::component::{AtomFamily, GeometricBlocks, MeasureComponent, SelfSimilar, INDEX_LIMIT};
use super::SymbolicMeasure;
use crate::error::{Error, Result};

impl SymbolicMeasure {
    /// `n` independent draws, reproducible from `seed`.
    ///
    /// Atoms and densities use the inverse CDF; self-similar parts descend a random
    /// coding word.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if !self.is_probability() {
            return Err(Error::NotProbability(self.total_mass()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let masses: Vec<f64> = self.components().iter().map(|c| c.mass()).collect();
        let samplers: Vec<Sampler> = self.components().iter().map(Sampler::new).collect();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut u = rng.random::<f64>() * self.total_mass();
            let mut k = 0;
            while k + 1 < masses.len() && u >= masses[k] {
                u -= masses[k];
                k += 1;
            }
            out.push(samplers[k].draw(&mut rng));
        }
        Ok(out)
    }
}

enum Sampler<'a> {
    Atoms { locs: Vec<f64>, cum: Vec<f64> },
    Family(&'a AtomFamily),
    Density { pieces: Vec<(f64, f64)>, cum: Vec<f64> },
    Blocks(&'a GeometricBlocks),
    SelfSimilar(&'a SelfSimilar),
}

fn cumulative(ws: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut s = 0.0;
    ws.map(|w| {
        s += w;
        s
    })
    .collect()
}

fn pick(cum: &[f64], u: f64) -> usize {
    let t = u * cum[cum.len() - 1];
    cum.partition_point(|&c| c <= t).min(cum.len() - 1)
}

impl<'a> Sampler<'a> {
    fn new(c: &'a MeasureComponent) -> Self {
        match c {
            MeasureComponent::Atoms(a) => Sampler::Atoms {
                locs: a.atoms().iter().map(|a| a.0).collect(),
                cum: cumulative(a.atoms().iter().map(|a| a.1)),
            },
            MeasureComponent::Family(f) => Sampler::Family(f),
            MeasureComponent::Density(d) => Sampler::Density {
                pieces: d.pieces().iter().map(|p| (p.a, p.b)).collect(),
                cum: cumulative(d.pieces().iter().map(|p| p.mass())),
            },
            MeasureComponent::Blocks(g) => Sampler::Blocks(g),
            MeasureComponent::SelfSimilar(s) => Sampler::SelfSimilar(s),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Atoms { locs, cum } => locs[pick(cum, rng.random())],
            Sampler::Density { pieces, cum } => {
                let (a, b) = pieces[pick(cum, rng.random())];
                a + (b - a) * rng.random::<f64>()
            }
            Sampler::Family(f) => draw_family(f, rng.random()),
            Sampler::Blocks(g) => draw_blocks(g, rng.random(), rng.random()),
            Sampler::SelfSimilar(s) => draw_self_similar(s, rng),
        }
    }
}

/// Index `i` such that the mass of atoms before `i` is `≤ t` and through `i` is `> t`.
fn draw_family(f: &AtomFamily, u: f64) -> f64 {
    let total = f.mass();
    // the atoms from index i on carry mass `remaining`
    let remaining = total * (1.0 - u);
    let tail = |i: u64| f.mass_from(i).value;
    let mut lo = f.first();
    let mut hi = match f.last() {
        Some(n) => n,
        None => {
            let mut h = lo.max(2) * 2;
            while h < INDEX_LIMIT && tail(h + 1) >= remaining {
                h *= 2;
            }
            h.min(INDEX_LIMIT)
        }
    };
    // smallest i with tail(i + 1) < remaining
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tail(mid + 1) < remaining {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    f.location(lo)
}

fn draw_blocks(g: &GeometricBlocks, u: f64, v: f64) -> f64 {
    // blocks are drawn top-down: block i is chosen when tail(i + 1) < remaining ≤ tail(i)
    let remaining = g.mass() * (1.0 - u);
    // block masses decay geometrically, so a linear walk is short
    let mut i = g.first();
    while g.in_range(i + 1) && g.tail_mass(i + 1) >= remaining && i < (1 << 20) {
        i += 1;
    }
    let (lo, hi) = g.block(i);
    lo + (hi - lo) * v
}

fn draw_self_similar(s: &SelfSimilar, rng: &mut ChaCha8Rng) -> f64 {
    let r = s.ifs().ratios();
    let o = s.ifs().offsets();
    let cum = cumulative(s.weights().iter().copied());
    let (mut lo, mut len) = (0.0, 1.0);
    let mut level = 0;
    loop {
        if s.depth() == Some(level) || len < 1e-17 {
            return lo + len * rng.random::<f64>();
        }
        let i = pick(&cum, rng.random());
        lo += len * o[i];
        len *= r[i];
        level += 1;
    }
}
