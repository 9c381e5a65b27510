//! Exact-rational staircases and majorization checks.
//!
//! Slow, but free of rounding: used to adjudicate verdicts whose
//! floating-point margin is too small to trust.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::staircase::{check_budget, type_classes};
use super::MajorizationVerdict;
use crate::dist::rational::rational_from_biguint;
use crate::dist::RationalDist;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct ExactLevel {
    /// Probability of each atom on the level.
    pub value: BigRational,
    pub count: BigUint,
}

#[derive(Debug, Clone)]
pub struct ExactStaircase {
    levels: Vec<ExactLevel>,
    cum_counts: Vec<BigUint>,
    head: Vec<BigRational>,
}

impl ExactStaircase {
    pub fn new(p: &RationalDist, n: u32, budget: u64) -> Result<Self> {
        let mut groups: Vec<(BigRational, u64)> = Vec::new();
        for w in p.weights() {
            match groups.last_mut() {
                Some((g, mult)) if g == w => *mult += 1,
                _ => groups.push((w.clone(), 1)),
            }
        }
        check_budget(n, groups.len(), budget)?;
        let mults: Vec<u64> = groups.iter().map(|g| g.1).collect();

        let mut by_value: BTreeMap<BigRational, BigUint> = BTreeMap::new();
        for (parts, count) in type_classes(n, &mults) {
            let mut value = BigRational::one();
            for (&k, (w, _)) in parts.iter().zip(&groups) {
                for _ in 0..k {
                    value *= w;
                }
            }
            *by_value.entry(value).or_insert_with(BigUint::zero) += count;
        }
        let levels: Vec<ExactLevel> = by_value
            .into_iter()
            .rev()
            .map(|(value, count)| ExactLevel { value, count })
            .collect();

        let mut cum_counts = vec![BigUint::zero()];
        let mut head = vec![BigRational::zero()];
        for level in &levels {
            let c = cum_counts.last().unwrap() + &level.count;
            let h = head.last().unwrap() + &level.value * rational_from_biguint(&level.count);
            cum_counts.push(c);
            head.push(h);
        }
        Ok(Self {
            levels,
            cum_counts,
            head,
        })
    }

    pub fn levels(&self) -> &[ExactLevel] {
        &self.levels
    }

    pub fn total_atoms(&self) -> &BigUint {
        &self.cum_counts[self.levels.len()]
    }

    pub fn total_mass(&self) -> &BigRational {
        &self.head[self.levels.len()]
    }

    /// Exact mass of the `atoms` largest atoms.
    pub fn prefix(&self, atoms: &BigUint) -> BigRational {
        if atoms >= self.total_atoms() {
            return BigRational::one();
        }
        let idx = self.cum_counts.partition_point(|c| c <= atoms) - 1;
        let taken = atoms - &self.cum_counts[idx];
        &self.head[idx] + &self.levels[idx].value * rational_from_biguint(&taken)
    }
}

/// Exact check of `P^⊗n ⪯ Q^⊗m` with zero tolerance.
pub fn majorizes_exact(
    p: &RationalDist,
    n: u32,
    q: &RationalDist,
    m: u32,
    budget: u64,
) -> Result<MajorizationVerdict> {
    let sp = ExactStaircase::new(p, n, budget)?;
    let sq = ExactStaircase::new(q, m, budget)?;
    let gap = |atoms: &BigUint| sq.prefix(atoms) - sp.prefix(atoms);

    let mut margin: Option<BigRational> = None;
    let mut witness = None;
    for i in 1..=sp.levels.len() {
        let g = gap(&sp.cum_counts[i]);
        if witness.is_none() && g < BigRational::zero() {
            // The gap is concave on the segment, so violations form a suffix.
            let mut ok = sp.cum_counts[i - 1].clone();
            let mut bad = sp.cum_counts[i].clone();
            while &bad - &ok > BigUint::one() {
                let mid: BigUint = (&ok + &bad) >> 1u32;
                if gap(&mid) < BigRational::zero() {
                    bad = mid;
                } else {
                    ok = mid;
                }
            }
            witness = Some(bad);
        }
        if margin.as_ref().is_none_or(|m| &g < m) {
            margin = Some(g);
        }
    }
    let margin = margin.and_then(|m| m.to_f64()).unwrap_or(0.0);
    Ok(MajorizationVerdict {
        holds: witness.is_none(),
        witness,
        margin,
    })
}
