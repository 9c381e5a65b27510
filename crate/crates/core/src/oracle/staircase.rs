//! Level structure of `P^⊗n`.
//!
//! Atoms of `P^⊗n` sharing a type class (symbol-count vector) share one
//! probability, so `P^⊗n` sorted non-increasingly is a staircase: a list of
//! distinct levels, each with a multiplicity. The Lorenz curve
//! `N ↦ Σ_{i≤N} P^⊗n↓(i)` is piecewise linear with breakpoints at the
//! cumulative level counts.

use num_bigint::BigUint;
use num_traits::{Pow, Zero};
use rayon::prelude::*;

use super::EmpiricalExponents;
use crate::dist::ProbDist;
use crate::error::{Error, Result};
use crate::numeric::{binomial, factorials, log2_biguint, multinomial, scaled_mass, NeumaierSum};

/// One probability level of a tensor power.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// `log2` of the probability of each atom on this level.
    pub log_value: f64,
    /// Number of atoms on this level.
    pub count: BigUint,
    /// `count · 2^log_value`.
    pub mass: f64,
}

/// Head and tail mass around a prefix length; `head + tail = 1`.
///
/// Both are computed directly, so whichever is small carries full relative
/// precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefix {
    pub head: f64,
    pub tail: f64,
}

impl Prefix {
    /// `Q(N) − P(N)` for `self = Q(N)`, taken from the tails once either
    /// prefix passes one half.
    pub fn gap_over(self, p: Prefix) -> f64 {
        if self.head <= 0.5 && p.head <= 0.5 {
            self.head - p.head
        } else {
            p.tail - self.tail
        }
    }
}

#[derive(Debug, Clone)]
pub struct Staircase {
    levels: Vec<Level>,
    n: u32,
    source_support: usize,
    /// `cum_counts[i]` atoms lie strictly above level `i`; one extra entry.
    cum_counts: Vec<BigUint>,
    head: Vec<f64>,
    tail: Vec<f64>,
}

/// Atoms grouped by exactly equal weight: `(log2 weight, multiplicity)`.
pub(crate) fn weight_groups(p: &ProbDist) -> Vec<(f64, u64)> {
    let mut groups: Vec<(f64, u64)> = Vec::new();
    for &l in p.log_weights() {
        match groups.last_mut() {
            Some((gl, mult)) if *gl == l => *mult += 1,
            _ => groups.push((l, 1)),
        }
    }
    groups
}

/// Number of type classes enumerated for `groups` distinct weights.
pub(crate) fn state_count(n: u32, groups: usize) -> BigUint {
    binomial(n as u64 + groups as u64 - 1, groups as u64 - 1)
}

pub(crate) fn check_budget(n: u32, groups: usize, budget: u64) -> Result<()> {
    let states = state_count(n, groups);
    if states > BigUint::from(budget) {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(())
}

/// Weak compositions of `total` into `parts` parts, lexicographically
/// decreasing.
pub(crate) struct Compositions {
    current: Vec<u64>,
    done: bool,
}

impl Compositions {
    pub fn new(total: u64, parts: usize) -> Self {
        let mut current = vec![0; parts];
        if parts > 0 {
            current[0] = total;
        }
        Self {
            current,
            done: parts == 0,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let last = self.current.len() - 1;
        match (0..last).rev().find(|&j| self.current[j] > 0) {
            None => self.done = true,
            Some(j) => {
                self.current[j] -= 1;
                if j + 1 == last {
                    self.current[last] += 1;
                } else {
                    self.current[j + 1] = self.current[last] + 1;
                    self.current[last] = 0;
                }
            }
        }
        Some(out)
    }
}

/// Enumerates every type class as `(parts, multiplicity)` over weight groups
/// with the given multiplicities, partitioned by the first coordinate.
pub(crate) fn type_classes(n: u32, mults: &[u64]) -> Vec<(Vec<u64>, BigUint)> {
    let n = n as u64;
    let facts = factorials(n);
    let groups = mults.len();
    let class_count = |parts: &[u64]| {
        let mut c = multinomial(parts, &facts);
        for (&k, &mult) in parts.iter().zip(mults) {
            if mult > 1 && k > 0 {
                c *= Pow::pow(BigUint::from(mult), k);
            }
        }
        c
    };
    if groups == 1 {
        let parts = vec![n];
        let c = class_count(&parts);
        return vec![(parts, c)];
    }
    (0..n as usize + 1)
        .into_par_iter()
        .rev()
        .flat_map_iter(|first| {
            let first = first as u64;
            Compositions::new(n - first, groups - 1).map(move |rest| {
                let mut parts = Vec::with_capacity(groups);
                parts.push(first);
                parts.extend(rest);
                parts
            })
        })
        .map(|parts| {
            let c = class_count(&parts);
            (parts, c)
        })
        .collect()
}

impl Staircase {
    /// Builds the staircase of `P^⊗n`, enumerating at most `budget` type
    /// classes.
    pub fn new(p: &ProbDist, n: u32, budget: u64) -> Result<Self> {
        let groups = weight_groups(p);
        check_budget(n, groups.len(), budget)?;
        let mults: Vec<u64> = groups.iter().map(|g| g.1).collect();
        let mut raw: Vec<(f64, BigUint)> = type_classes(n, &mults)
            .into_iter()
            .map(|(parts, count)| {
                let log_value: f64 = parts
                    .iter()
                    .zip(&groups)
                    .map(|(&k, &(l, _))| k as f64 * l)
                    .sum();
                (log_value, count)
            })
            .collect();
        raw.sort_by(|a, b| b.0.total_cmp(&a.0));

        let merge_tol = 1e-12 * f64::from(n.max(1));
        let mut merged: Vec<(f64, BigUint)> = Vec::new();
        for (log_value, count) in raw {
            match merged.last_mut() {
                Some((top, acc)) if *top - log_value <= merge_tol => *acc += count,
                _ => merged.push((log_value, count)),
            }
        }
        let levels = merged
            .into_iter()
            .map(|(log_value, count)| Level {
                mass: scaled_mass(&count, log_value),
                log_value,
                count,
            })
            .collect();
        Ok(Self::from_levels(levels, n, p.support()))
    }

    fn from_levels(levels: Vec<Level>, n: u32, source_support: usize) -> Self {
        let len = levels.len();
        let mut cum_counts = Vec::with_capacity(len + 1);
        let mut acc = BigUint::zero();
        cum_counts.push(acc.clone());
        for level in &levels {
            acc += &level.count;
            cum_counts.push(acc.clone());
        }
        let mut head = Vec::with_capacity(len + 1);
        let mut sum = NeumaierSum::new();
        head.push(0.0);
        for level in &levels {
            sum += level.mass;
            head.push(sum.value());
        }
        let mut tail = vec![0.0; len + 1];
        let mut sum = NeumaierSum::new();
        for i in (0..len).rev() {
            sum += levels[i].mass;
            tail[i] = sum.value();
        }
        Self {
            levels,
            n,
            source_support,
            cum_counts,
            head,
            tail,
        }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// The tensor power `n`.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn source_support(&self) -> usize {
        self.source_support
    }

    /// `d^n`.
    pub fn total_atoms(&self) -> &BigUint {
        &self.cum_counts[self.levels.len()]
    }

    /// Cumulative atom counts at the end of each level (the Lorenz
    /// breakpoints).
    pub fn breakpoints(&self) -> &[BigUint] {
        &self.cum_counts[1..]
    }

    /// Sum of all level masses.
    pub fn total_mass(&self) -> f64 {
        self.head[self.levels.len()]
    }

    /// Mass of the `i` largest levels, as head and tail.
    pub fn prefix_at_level(&self, i: usize) -> Prefix {
        Prefix {
            head: self.head[i],
            tail: self.tail[i],
        }
    }

    /// Mass of the `atoms` largest atoms of `P^⊗n`.
    pub fn prefix(&self, atoms: &BigUint) -> Prefix {
        if atoms >= self.total_atoms() {
            return Prefix {
                head: 1.0,
                tail: 0.0,
            };
        }
        let idx = self.cum_counts.partition_point(|c| c <= atoms) - 1;
        let level = &self.levels[idx];
        let taken = atoms - &self.cum_counts[idx];
        let left = &level.count - &taken;
        Prefix {
            head: self.head[idx] + scaled_mass(&taken, level.log_value),
            tail: scaled_mass(&left, level.log_value) + self.tail[idx + 1],
        }
    }

    /// Threshold counts at `V` (threshold `2^{nV}`).
    ///
    /// Levels within `1e-12·n` of `n·V` count as at the threshold. With
    /// `strict`, at-threshold atoms are excluded from both sides, except when
    /// the threshold sits on the top or bottom level.
    pub fn counts(&self, v: f64, strict: bool) -> FiniteCounts {
        let n = f64::from(self.n.max(1));
        let threshold = f64::from(self.n) * v;
        let tol = 1e-12 * n;
        let last = self.levels.len() - 1;

        let mut above = (NeumaierSum::new(), BigUint::zero());
        let mut below = (NeumaierSum::new(), BigUint::zero());
        let mut at = (NeumaierSum::new(), BigUint::zero());
        let mut at_level = None;
        for (i, level) in self.levels.iter().enumerate() {
            let bucket = if level.log_value > threshold + tol {
                &mut above
            } else if level.log_value < threshold - tol {
                &mut below
            } else {
                at_level = Some(i);
                &mut at
            };
            bucket.0 += level.mass;
            bucket.1 += &level.count;
        }
        let at_endpoint = matches!(at_level, Some(i) if i == 0 || i == last);
        let include_at = !strict || at_endpoint;
        let at_mass = at.0.value();
        let (mut mass, mut mass_star) = (above.0.value(), below.0.value());
        let (mut size, mut size_star) = (above.1, below.1);
        if include_at {
            mass += at_mass;
            mass_star += at_mass;
            size += &at.1;
            size_star += &at.1;
        }
        FiniteCounts {
            mass,
            mass_star,
            size,
            size_star,
            threshold_mass: at_mass,
            threshold_included: include_at,
        }
    }

    /// `(1/n)·log2` of the weak threshold counts; empty sides give `-inf`.
    pub fn empirical_exponents(&self, v: f64) -> EmpiricalExponents {
        let c = self.counts(v, false);
        let scale = 1.0 / f64::from(self.n.max(1));
        let log = |x: f64| {
            if x > 0.0 {
                x.log2() * scale
            } else {
                f64::NEG_INFINITY
            }
        };
        let log_count = |x: &BigUint| {
            if x.is_zero() {
                f64::NEG_INFINITY
            } else {
                log2_biguint(x) * scale
            }
        };
        EmpiricalExponents {
            mass: log(c.mass),
            mass_star: log(c.mass_star),
            size: log_count(&c.size),
            size_star: log_count(&c.size_star),
        }
    }
}

/// Finite-`n` threshold masses and counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCounts {
    /// Mass of atoms at or above the threshold.
    pub mass: f64,
    /// Mass of atoms at or below the threshold.
    pub mass_star: f64,
    pub size: BigUint,
    pub size_star: BigUint,
    /// Mass of atoms exactly at the threshold.
    pub threshold_mass: f64,
    /// Whether at-threshold atoms were counted on both sides.
    pub threshold_included: bool,
}

impl FiniteCounts {
    /// `m + m* ∓ (mass at threshold)`, which equals one.
    pub fn balance(&self) -> f64 {
        if self.threshold_included {
            self.mass + self.mass_star - self.threshold_mass
        } else {
            self.mass + self.mass_star + self.threshold_mass
        }
    }
}
