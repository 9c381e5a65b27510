//! Finite-`n` computations over tensor powers.
//!
//! Atoms are enumerated by type class, so the cost grows with the number of
//! compositions of `n`, not with `d^n`. Majorization of two tensor powers is
//! decided exactly on the breakpoints of the left-hand Lorenz curve: between
//! consecutive breakpoints that curve is a chord while the right-hand curve is
//! concave, so dominance at the endpoints gives dominance on the whole piece.

mod brute;
mod exact;
mod staircase;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;

pub use brute::{brute_majorizes, tensor_atoms, BRUTE_CAP};
pub use exact::{majorizes_exact, ExactLevel, ExactStaircase};
pub use staircase::{FiniteCounts, Level, Prefix, Staircase};

use crate::dist::{ProbDist, RationalDist};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 2_000_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Float verdicts with a smaller margin are re-checked exactly when rational
/// inputs are available.
pub const ADJUDICATION_MARGIN: f64 = 1e-10;

/// Outcome of a tensor-power majorization check.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// Smallest prefix length at which the left side exceeds the right.
    pub witness: Option<BigUint>,
    /// Minimum of right prefix minus left prefix over the checked
    /// breakpoints.
    pub margin: f64,
}

/// Result of scanning `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPower {
    pub first: Option<u32>,
    /// `holds[k]` is the verdict at `n = k + 1`.
    pub holds: Vec<bool>,
}

impl MinPower {
    /// Whether the relation holds from `first` through `n_max`.
    pub fn persistent(&self) -> bool {
        match self.first {
            Some(f) => self.holds[f as usize - 1..].iter().all(|&h| h),
            None => false,
        }
    }
}

/// Normalised logarithms of the finite-`n` threshold counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalExponents {
    pub mass: f64,
    pub mass_star: f64,
    pub size: f64,
    pub size_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle {
    /// Maximum number of type classes enumerated per staircase.
    pub budget: u64,
    /// Prefix differences above `-tolerance` count as dominated.
    pub tolerance: f64,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl Oracle {
    pub fn with_budget(budget: u64) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn staircase(&self, p: &ProbDist, n: u32) -> Result<Staircase> {
        Staircase::new(p, n, self.budget)
    }

    pub fn finite_counts(
        &self,
        p: &ProbDist,
        n: u32,
        v: f64,
        strict: bool,
    ) -> Result<FiniteCounts> {
        Ok(self.staircase(p, n)?.counts(v, strict))
    }

    /// Decides `P^⊗n ⪯ Q^⊗m`.
    pub fn majorizes(
        &self,
        p: &ProbDist,
        n: u32,
        q: &ProbDist,
        m: u32,
    ) -> Result<MajorizationVerdict> {
        let sp = self.staircase(p, n)?;
        let sq = self.staircase(q, m)?;
        Ok(self.compare(&sp, &sq))
    }

    /// Compares two staircases directly.
    pub fn compare(&self, sp: &Staircase, sq: &Staircase) -> MajorizationVerdict {
        let tol = self.tolerance;
        let gap_at = |atoms: &BigUint| sq.prefix(atoms).gap_over(sp.prefix(atoms));
        let breaks = sp.breakpoints();

        let mut margin = f64::INFINITY;
        let mut witness = None;
        for (i, end) in breaks.iter().enumerate() {
            let gap = sq.prefix(end).gap_over(sp.prefix_at_level(i + 1));
            margin = margin.min(gap);
            if witness.is_none() && gap < -tol {
                let mut ok = if i == 0 {
                    BigUint::default()
                } else {
                    breaks[i - 1].clone()
                };
                let mut bad = end.clone();
                while &bad - &ok > BigUint::one() {
                    let mid: BigUint = (&ok + &bad) >> 1u32;
                    if gap_at(&mid) < -tol {
                        bad = mid;
                    } else {
                        ok = mid;
                    }
                }
                witness = Some(bad);
            }
        }
        // A larger right-hand support always leaves mass below one at the
        // left's full support, however close the float gap looks.
        if witness.is_none() && sq.total_atoms() > sp.total_atoms() {
            witness = Some(sp.total_atoms().clone());
        }
        MajorizationVerdict {
            holds: witness.is_none(),
            witness,
            margin,
        }
    }

    /// Full-enumeration check; see [`brute_majorizes`].
    pub fn brute_majorizes(
        &self,
        p: &ProbDist,
        n: u32,
        q: &ProbDist,
        m: u32,
    ) -> Result<MajorizationVerdict> {
        brute_majorizes(p, n, q, m, self.tolerance)
    }

    /// Float check, re-decided exactly when the margin is within
    /// [`ADJUDICATION_MARGIN`] of zero.
    pub fn majorizes_adjudicated(
        &self,
        p: &RationalDist,
        n: u32,
        q: &RationalDist,
        m: u32,
    ) -> Result<MajorizationVerdict> {
        let verdict = self.majorizes(&p.to_prob_dist(), n, &q.to_prob_dist(), m)?;
        if verdict.margin.abs() < ADJUDICATION_MARGIN {
            return majorizes_exact(p, n, q, m, self.budget);
        }
        Ok(verdict)
    }

    /// Scans `n = 1..=n_max` for `P^⊗n ⪯ Q^⊗⌊n·r⌋`.
    pub fn min_power(
        &self,
        p: &ProbDist,
        q: &ProbDist,
        r: Ratio<u64>,
        n_max: u32,
    ) -> Result<MinPower> {
        if *r.numer() == 0 {
            return Err(Error::InvalidArgument("r must be positive".into()));
        }
        let mut holds = Vec::with_capacity(n_max as usize);
        for n in 1..=n_max {
            let m = (Ratio::from_integer(u64::from(n)) * r).to_integer();
            let m = u32::try_from(m)
                .map_err(|_| Error::InvalidArgument(format!("target power {m} is too large")))?;
            holds.push(self.majorizes(p, n, q, m)?.holds);
        }
        let first = holds.iter().position(|&h| h).map(|i| i as u32 + 1);
        Ok(MinPower { first, holds })
    }

    /// `(1/n)·log2` of the weak threshold counts; empty sides give `-inf`.
    pub fn empirical_exponents(&self, p: &ProbDist, n: u32, v: f64) -> Result<EmpiricalExponents> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(self.staircase(p, n)?.empirical_exponents(v))
    }
}
