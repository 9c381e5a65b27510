//! Rényi entropies, relative entropy and the log-partition function
//! `F(α) = log2 Σ p_i^α` together with its derivatives and tilted
//! (escort) distributions `p_i^α / Σ_j p_j^α`.
//!
//! All power sums are evaluated in the log domain after shifting by the
//! largest exponent, so `|α|` in the hundreds (or far beyond) is safe.

use std::f64::consts::LN_2;
use std::fmt;

use crate::dist::ProbDist;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, NeumaierSum};

/// Half-width of the band around `α = 1` evaluated through the Shannon
/// expansion instead of the removable `0/0` form.
pub const SHANNON_BAND: f64 = 1e-6;

/// An order parameter on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedAlpha {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl ExtendedAlpha {
    /// Maps `±inf` floats to the symbolic endpoints.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Self::PlusInfinity
        } else if x == f64::NEG_INFINITY {
            Self::MinusInfinity
        } else {
            Self::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(x) => x,
            Self::PlusInfinity => f64::INFINITY,
            Self::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

impl From<f64> for ExtendedAlpha {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for ExtendedAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::PlusInfinity => f.write_str("+inf"),
            Self::MinusInfinity => f.write_str("-inf"),
        }
    }
}

impl std::str::FromStr for ExtendedAlpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Self::PlusInfinity),
            "-inf" | "-infinity" => Ok(Self::MinusInfinity),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|x| !x.is_nan())
                .map(Self::from_f64)
                .ok_or_else(|| Error::Parse(format!("`{s}` is not an order parameter"))),
        }
    }
}

/// Moments of the tilted distribution at a finite `α`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TiltMoments {
    /// `max_i α·log2 p_i`.
    pub shift: f64,
    /// `log2 Σ 2^{α·l_i − shift}`.
    pub log_partition: f64,
    /// Tilted mean of the log-weights, `F'(α)`.
    pub mean: f64,
    /// Tilted variance of the log-weights.
    pub variance: f64,
}

impl TiltMoments {
    pub fn f(&self) -> f64 {
        self.shift + self.log_partition
    }
}

/// Unnormalized tilted weights `2^{α·l_i − shift}` and the shift.
fn shifted_powers(p: &ProbDist, alpha: f64) -> (Vec<f64>, f64) {
    let logs = p.log_weights();
    let shift = if alpha >= 0.0 {
        alpha * logs[0]
    } else {
        alpha * logs[logs.len() - 1]
    };
    let w = logs.iter().map(|&l| (alpha * l - shift).exp2()).collect();
    (w, shift)
}

pub(crate) fn tilt_moments(p: &ProbDist, alpha: f64) -> TiltMoments {
    let (w, shift) = shifted_powers(p, alpha);
    let z = compensated_sum(w.iter().copied());
    let logs = p.log_weights();
    let mean = compensated_sum(w.iter().zip(logs).map(|(wi, li)| wi * li)) / z;
    let variance = compensated_sum(
        w.iter()
            .zip(logs)
            .map(|(wi, li)| wi * (li - mean) * (li - mean)),
    ) / z;
    TiltMoments {
        shift,
        log_partition: z.log2(),
        mean,
        variance: variance.max(0.0),
    }
}

fn require_nontrivial(p: &ProbDist) -> Result<()> {
    if p.is_trivial() {
        Err(Error::TrivialDistribution)
    } else {
        Ok(())
    }
}

fn require_finite(alpha: f64) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange { alpha })
    }
}

/// Shannon entropy in bits.
pub fn shannon(p: &ProbDist) -> f64 {
    let h = -compensated_sum(p.weights().iter().zip(p.log_weights()).map(|(w, l)| w * l));
    h.max(0.0)
}

/// Rényi entropy `H_α(P)` in bits for `α ∈ [0, ∞]`.
pub fn renyi(p: &ProbDist, alpha: ExtendedAlpha) -> Result<f64> {
    let a = match alpha {
        ExtendedAlpha::PlusInfinity => return Ok((-p.log_weights()[0]).max(0.0)),
        ExtendedAlpha::MinusInfinity => {
            return Err(Error::AlphaOutOfRange {
                alpha: f64::NEG_INFINITY,
            })
        }
        ExtendedAlpha::Finite(a) => a,
    };
    if a.is_nan() || a < 0.0 {
        return Err(Error::AlphaOutOfRange { alpha: a });
    }
    if p.is_trivial() {
        return Ok(0.0);
    }
    if a == 0.0 {
        return Ok((p.support() as f64).log2());
    }
    let h = if a == 1.0 {
        shannon(p)
    } else if (a - 1.0).abs() < SHANNON_BAND {
        // First-order expansion: H_α = H − (α−1)·F''(1)/2 + O((α−1)²).
        let m = tilt_moments(p, 1.0);
        shannon(p) - 0.5 * (a - 1.0) * LN_2 * m.variance
    } else {
        let (w, shift) = shifted_powers(p, a);
        (shift + compensated_sum(w).log2()) / (1.0 - a)
    };
    Ok(h.max(0.0))
}

/// `F(α) = log2 Σ p_i^α`.
pub fn log_partition(p: &ProbDist, alpha: f64) -> Result<f64> {
    require_nontrivial(p)?;
    require_finite(alpha)?;
    if alpha == 0.0 {
        return Ok((p.support() as f64).log2());
    }
    Ok(tilt_moments(p, alpha).f())
}

/// `F'(α)`: the mean of `log2 p_i` under the tilted distribution.
pub fn log_partition_prime(p: &ProbDist, alpha: f64) -> Result<f64> {
    require_nontrivial(p)?;
    require_finite(alpha)?;
    Ok(tilt_moments(p, alpha).mean)
}

/// `F''(α) = ln 2 · Var_{P_α}(log2 p_i)`.
///
/// The `ln 2` factor comes from differentiating `2^{α·log2 p}`; it vanishes
/// for natural logarithms.
pub fn log_partition_second(p: &ProbDist, alpha: f64) -> Result<f64> {
    require_nontrivial(p)?;
    require_finite(alpha)?;
    Ok(LN_2 * tilt_moments(p, alpha).variance)
}

/// Tilted distribution together with the map from its canonical indices to
/// the canonical indices of the source distribution.
#[derive(Debug, Clone)]
pub struct Tilted {
    pub dist: ProbDist,
    pub alignment: Vec<usize>,
}

/// The escort distribution `P_α(i) = p_i^α / Σ_j p_j^α`, re-canonicalized.
pub fn tilt(p: &ProbDist, alpha: f64) -> Result<ProbDist> {
    Ok(tilt_aligned(p, alpha)?.dist)
}

/// Like [`tilt`], also returning the index alignment needed by
/// [`relative_entropy`] (negative `α` reverses the order).
pub fn tilt_aligned(p: &ProbDist, alpha: f64) -> Result<Tilted> {
    require_nontrivial(p)?;
    require_finite(alpha)?;
    let (w, _) = shifted_powers(p, alpha);
    let z = compensated_sum(w.iter().copied());
    let mut indexed: Vec<(usize, f64)> = w
        .into_iter()
        .map(|x| x / z)
        .enumerate()
        .filter(|&(_, x)| x > 0.0)
        .collect();
    indexed.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let weights: Vec<f64> = indexed.iter().map(|&(_, x)| x).collect();
    let alignment = indexed.iter().map(|&(i, _)| i).collect();
    Ok(Tilted {
        dist: ProbDist::normalized(&weights)?,
        alignment,
    })
}

/// Identity alignment for two distributions indexed the same way.
pub fn identity_alignment(d: usize) -> Vec<usize> {
    (0..d).collect()
}

/// Relative entropy `D(Q‖P)` in bits.
///
/// `alignment[i]` is the canonical index in `p` of the atom that `q`'s
/// canonical atom `i` sits on; it must be injective.
pub fn relative_entropy(q: &ProbDist, p: &ProbDist, alignment: &[usize]) -> Result<f64> {
    if alignment.len() != q.support() {
        return Err(Error::SupportMismatch(format!(
            "alignment has {} entries for {} atoms",
            alignment.len(),
            q.support()
        )));
    }
    let mut seen = vec![false; p.support()];
    for &j in alignment {
        if j >= p.support() {
            return Err(Error::SupportMismatch(format!(
                "index {j} outside a support of size {}",
                p.support()
            )));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::SupportMismatch(format!("index {j} used twice")));
        }
    }
    let mut acc = NeumaierSum::new();
    for (i, &j) in alignment.iter().enumerate() {
        acc += q.weights()[i] * (q.log_weights()[i] - p.log_weights()[j]);
    }
    Ok(acc.value().max(0.0))
}
