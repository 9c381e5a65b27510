//! Small numerical building blocks shared by the other modules.

use std::f64::consts::FRAC_PI_2;
use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Kahan-Babuska-Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Compensated sum of a sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// `log2` of an arbitrary-precision integer; `-inf` for zero.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::log2);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

/// `count * 2^log_value`, exact when both factors are exactly representable.
pub fn scaled_mass(count: &BigUint, log_value: f64) -> f64 {
    if count.is_zero() {
        return 0.0;
    }
    let unit = log_value.exp2();
    if count.bits() <= 53 && unit.is_normal() {
        let c = count.to_f64().expect("53-bit integer fits in f64");
        let product = c * unit;
        if product.is_finite() {
            return product;
        }
    }
    (log2_biguint(count) + log_value).exp2()
}

/// Binomial coefficient `C(n, k)` as an arbitrary-precision integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Factorials `0!..=n!`.
pub fn factorials(n: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::one();
    out.push(acc.clone());
    for i in 1..=n {
        acc *= i;
        out.push(acc.clone());
    }
    out
}

/// Multinomial coefficient `n! / prod(k_i!)` for `n = sum(k_i)`.
pub fn multinomial(parts: &[u64], facts: &[BigUint]) -> BigUint {
    let n: u64 = parts.iter().sum();
    let mut acc = facts[n as usize].clone();
    for &k in parts {
        acc /= &facts[k as usize];
    }
    acc
}

/// `log2` of the multinomial coefficient via log-gamma sums.
pub fn log2_multinomial(parts: &[u64]) -> f64 {
    let n: u64 = parts.iter().sum();
    let log2_fact = |k: u64| (1..=k).map(|i| (i as f64).log2()).sum::<f64>();
    log2_fact(n) - parts.iter().map(|&k| log2_fact(k)).sum::<f64>()
}

/// Points of the map `theta -> tan(theta)` on `[0, pi/2]`.
///
/// Returns `count` values of theta, the first `0` and the last `pi/2`.
pub fn half_tan_grid(count: usize) -> Vec<f64> {
    assert!(count >= 2, "grid needs both endpoints");
    let last = (count - 1) as f64;
    (0..count).map(|k| FRAC_PI_2 * k as f64 / last).collect()
}

/// Golden-section search for a local minimum of `f` on `[a, b]`.
///
/// Returns `(x, f(x))` for the best point seen once the bracket is narrower
/// than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
        iterations += 1;
    }
    best
}
