//! Values with an absolute error bound, and certified power-series sums.
//!
//! The infinite atom families only need sums of the form `Σ i^{-q}` over an
//! index range. Short ranges are summed directly; long ranges and tails use
//! Euler–Maclaurin with the first omitted term as the remainder bound, which
//! is valid because `x ↦ x^{-q}` is completely monotone.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::Serialize;

/// A value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
}

impl Certified {
    pub const ZERO: Certified = Certified { value: 0.0, error: 0.0 };

    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error: error.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    /// Midpoint of `[lo, hi]` with half-width error.
    pub fn between(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        Self { value: 0.5 * (lo + hi), error: 0.5 * (hi - lo) }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    /// Clamp into `[0, ∞)` without losing the enclosure.
    pub fn non_negative(self) -> Self {
        if self.value >= 0.0 {
            self
        } else {
            Self { value: 0.0, error: self.error + (-self.value) }
        }
    }
}

impl Add for Certified {
    type Output = Certified;
    fn add(self, rhs: Certified) -> Certified {
        let value = self.value + rhs.value;
        Certified { value, error: self.error + rhs.error + f64::EPSILON * value.abs() }
    }
}

impl AddAssign for Certified {
    fn add_assign(&mut self, rhs: Certified) {
        *self = *self + rhs;
    }
}

impl Sub for Certified {
    type Output = Certified;
    fn sub(self, rhs: Certified) -> Certified {
        let value = self.value - rhs.value;
        Certified { value, error: self.error + rhs.error + f64::EPSILON * (self.value.abs() + rhs.value.abs()) }
    }
}

impl Neg for Certified {
    type Output = Certified;
    fn neg(self) -> Certified {
        Certified { value: -self.value, error: self.error }
    }
}

impl Mul<f64> for Certified {
    type Output = Certified;
    fn mul(self, c: f64) -> Certified {
        let value = self.value * c;
        Certified { value, error: self.error * c.abs() + f64::EPSILON * value.abs() }
    }
}

impl Sum for Certified {
    fn sum<I: Iterator<Item = Certified>>(iter: I) -> Certified {
        iter.fold(Certified::ZERO, |acc, x| acc + x)
    }
}

/// Below this index tails are started with an explicit head sum.
const EM_START: u64 = 32;
/// Ranges up to this length are summed term by term.
const DIRECT_LIMIT: u64 = 64;

/// Bernoulli numbers B2, B4, ..., B10 divided by the matching factorial.
const BERNOULLI_OVER_FACTORIAL: [f64; 5] =
    [1.0 / 6.0 / 2.0, -1.0 / 30.0 / 24.0, 1.0 / 42.0 / 720.0, -1.0 / 30.0 / 40_320.0, 5.0 / 66.0 / 3_628_800.0];

fn term(q: f64, i: u64) -> f64 {
    let x = i as f64;
    if q == 2.0 {
        1.0 / (x * x)
    } else {
        x.powf(-q)
    }
}

fn direct(q: f64, m: u64, n: u64) -> Certified {
    if n < m {
        return Certified::ZERO;
    }
    let mut s = 0.0;
    // smallest terms first
    let mut i = n;
    loop {
        s += term(q, i);
        if i == m {
            break;
        }
        i -= 1;
    }
    let count = (n - m + 1) as f64;
    Certified { value: s, error: 2.0 * count * f64::EPSILON * s }
}

/// `Σ_{i ≥ a} i^{-q}` by Euler–Maclaurin, `a ≥ EM_START`.
fn em_tail(q: f64, a: f64) -> Certified {
    let integral = a.powf(1.0 - q) / (q - 1.0);
    let fa = a.powf(-q);
    let mut value = integral + 0.5 * fa;
    let mut rising = q; // q(q+1)...(q+j-1) for j = 2k-1
    let mut next = 0.0;
    for (k, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let j = 2 * k + 1;
        if k > 0 {
            rising *= (q + (j - 2) as f64) * (q + (j - 1) as f64);
        }
        // -B_{2k}/(2k)! f^{(2k-1)}(a), f^{(j)}(a) = (-1)^j rising a^{-q-j}
        let t = coef * rising * a.powf(-q - j as f64);
        if k + 1 == BERNOULLI_OVER_FACTORIAL.len() {
            next = t;
        } else {
            value += t;
        }
    }
    Certified { value, error: 2.0 * next.abs() + 8.0 * f64::EPSILON * value.abs() }
}

/// `Σ_{i ≥ m} i^{-q}` for `q > 1`, `m ≥ 1`.
pub fn power_tail(q: f64, m: u64) -> Certified {
    debug_assert!(q > 1.0);
    let m = m.max(1);
    if m >= EM_START {
        return em_tail(q, m as f64);
    }
    direct(q, m, EM_START - 1) + em_tail(q, EM_START as f64)
}

/// `Σ_{i=m}^{n} i^{-q}`; `n = None` means the infinite tail.
pub fn power_range(q: f64, m: u64, n: Option<u64>) -> Certified {
    let m = m.max(1);
    match n {
        None => power_tail(q, m),
        Some(n) if n < m => Certified::ZERO,
        Some(n) if n - m < DIRECT_LIMIT => direct(q, m, n),
        Some(n) => (power_tail(q, m) - power_tail(q, n + 1)).non_negative(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(q: f64, m: u64, n: u64) -> f64 {
        (m..=n).rev().map(|i| (i as f64).powf(-q)).sum()
    }

    #[test]
    fn basel_tail_matches_closed_form() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        let c = power_tail(2.0, 1);
        assert!((c.value - z2).abs() <= c.error.max(1e-15), "{c:?}");
        assert!(c.error < 1e-13);
    }

    #[test]
    fn ranges_agree_with_brute_force() {
        for &q in &[1.5, 2.0, 3.0, 4.25] {
            for &(m, n) in &[(1, 10), (5, 500), (31, 33), (40, 20_000), (1, 100_000)] {
                let c = power_range(q, m, Some(n));
                let b = brute(q, m, n);
                assert!((c.value - b).abs() <= c.error + 1e-14 * b, "q={q} m={m} n={n}: {c:?} vs {b}");
            }
        }
    }

    #[test]
    fn tail_error_is_tiny() {
        for &q in &[1.5, 2.0, 3.0] {
            for &m in &[1, 7, 32, 1000, 1 << 40] {
                assert!(power_tail(q, m).error < 1e-12);
            }
        }
    }

    #[test]
    fn zeta_three() {
        let z3 = 1.202_056_903_159_594_3;
        let c = power_tail(3.0, 1);
        assert!((c.value - z3).abs() < 1e-14);
    }
}
