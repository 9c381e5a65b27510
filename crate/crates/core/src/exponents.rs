//! Closed-form asymptotic exponents of tensor-power level sets.
//!
//! For a value `V ∈ [log2 P(d), log2 P(1)]` the four exponents are the
//! growth rates (in bits per copy) of
//!
//! | exponent | quantity |
//! |----------|----------|
//! | `M`  | mass of atoms of `P^⊗n` with probability `≥ 2^{nV}` |
//! | `M*` | mass of atoms with probability `≤ 2^{nV}` |
//! | `S`  | number of atoms with probability `≥ 2^{nV}` |
//! | `S*` | number of atoms with probability `≤ 2^{nV}` |
//!
//! Each is either constant (`0` for masses, `log2 d` for sizes) or one of the
//! Legendre pieces `F(α) + (1−α)F'(α)` (mass) and `F(α) − αF'(α)` (size)
//! evaluated at the unique `α_V` solving `F'(α_V) = V`. The constant regimes
//! switch at `V = −H(P)` (masses, `α_V = 1`) and at `V = Σ log2 p_i / d`
//! (sizes, `α_V = 0`).

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rayon::prelude::*;

use crate::dist::ProbDist;
use crate::entropy::{shannon, tilt_moments, ExtendedAlpha};
use crate::error::{Error, Result};

/// Absolute tolerance in value space for endpoint snapping and range checks.
pub const VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPoint {
    /// `V`, in bits per copy.
    pub value: f64,
    pub alpha: ExtendedAlpha,
    /// `M(V)`
    pub mass: f64,
    /// `M*(V)`
    pub mass_star: f64,
    /// `S(V)`
    pub size: f64,
    /// `S*(V)`
    pub size_star: f64,
}

/// The distinguished values of a non-uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmarks {
    /// `log2 P(d)`
    pub lo: f64,
    /// `log2 P(1)`
    pub hi: f64,
    /// `Σ log2 p_i / d`, where `α_V = 0`.
    pub mean_log: f64,
    /// `−H(P)`, where `α_V = 1`.
    pub neg_entropy: f64,
    pub log_support: f64,
    pub log_argmax: f64,
    pub log_argmin: f64,
}

impl Landmarks {
    pub fn new(p: &ProbDist) -> Result<Self> {
        if p.is_trivial() {
            return Err(Error::TrivialDistribution);
        }
        if p.is_uniform() {
            return Err(Error::UniformDistribution);
        }
        let logs = p.log_weights();
        Ok(Self {
            lo: logs[logs.len() - 1],
            hi: logs[0],
            mean_log: p.mean_log(),
            neg_entropy: -shannon(p),
            log_support: (p.support() as f64).log2(),
            log_argmax: (p.argmax_count() as f64).log2(),
            log_argmin: (p.argmin_count() as f64).log2(),
        })
    }

    fn check(&self, v: f64) -> Result<()> {
        if v.is_nan() || v < self.lo - VALUE_TOL || v > self.hi + VALUE_TOL {
            return Err(Error::ValueOutOfRange {
                value: v,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }

    /// Assembles the four exponents at `v` given its solved order parameter.
    fn point(&self, p: &ProbDist, v: f64, alpha: ExtendedAlpha) -> ExponentPoint {
        // S-piece F(α) − αV; using V rather than F'(α) keeps the error
        // second order in the solver residual.
        let legendre_size = match alpha {
            ExtendedAlpha::PlusInfinity => self.log_argmax,
            ExtendedAlpha::MinusInfinity => self.log_argmin,
            ExtendedAlpha::Finite(a) => {
                let anchor = if a >= 0.0 { self.hi } else { self.lo };
                tilt_moments(p, a).log_partition + a * (anchor - v)
            }
        };
        let legendre_size = legendre_size.clamp(0.0, self.log_support);
        let legendre_mass = (legendre_size + v).min(0.0);
        let (mass, mass_star) = if v <= self.neg_entropy {
            (0.0, legendre_mass)
        } else {
            (legendre_mass, 0.0)
        };
        let (size, size_star) = if v <= self.mean_log {
            (self.log_support, legendre_size)
        } else {
            (legendre_size, self.log_support)
        };
        ExponentPoint {
            value: v,
            alpha,
            mass,
            mass_star,
            size,
            size_star,
        }
    }
}

/// Solves `F'(α) = V` for `α` on the extended line.
///
/// Values within [`VALUE_TOL`] of `log2 P(1)` (resp. `log2 P(d)`) map to
/// `+∞` (resp. `−∞`).
pub fn solve_alpha(p: &ProbDist, v: f64) -> Result<ExtendedAlpha> {
    let lm = Landmarks::new(p)?;
    lm.check(v)?;
    Ok(solve_with(p, &lm, v))
}

fn solve_with(p: &ProbDist, lm: &Landmarks, v: f64) -> ExtendedAlpha {
    if v >= lm.hi - VALUE_TOL {
        return ExtendedAlpha::PlusInfinity;
    }
    if v <= lm.lo + VALUE_TOL {
        return ExtendedAlpha::MinusInfinity;
    }
    let residual = |a: f64| tilt_moments(p, a).mean - v;

    let (mut a, mut b) = (-1.0f64, 1.0f64);
    while residual(b) < 0.0 {
        a = b;
        b *= 2.0;
        if b > 1e300 {
            return ExtendedAlpha::PlusInfinity;
        }
    }
    while residual(a) > 0.0 {
        b = a;
        a *= 2.0;
        if a < -1e300 {
            return ExtendedAlpha::MinusInfinity;
        }
    }

    for _ in 0..400 {
        let width = b - a;
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        let mid = 0.5 * (a + b);
        let r = residual(mid);
        if r == 0.0 {
            return ExtendedAlpha::Finite(mid);
        }
        if r < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }

    let (ra, rb) = (residual(a), residual(b));
    let mut alpha = if ra.abs() <= rb.abs() { a } else { b };
    let mut r = ra.abs().min(rb.abs());
    for _ in 0..3 {
        if r == 0.0 {
            break;
        }
        let m = tilt_moments(p, alpha);
        let slope = LN_2 * m.variance;
        if slope <= 0.0 {
            break;
        }
        let next = alpha - (m.mean - v) / slope;
        if !(a..=b).contains(&next) {
            break;
        }
        let rn = residual(next).abs();
        if rn >= r {
            break;
        }
        alpha = next;
        r = rn;
    }
    ExtendedAlpha::Finite(alpha)
}

/// The exponents `M, M*, S, S*` at `V`.
pub fn exponents_at(p: &ProbDist, v: f64) -> Result<ExponentPoint> {
    let lm = Landmarks::new(p)?;
    lm.check(v)?;
    let v = v.clamp(lm.lo, lm.hi);
    let alpha = solve_with(p, &lm, v);
    Ok(lm.point(p, v, alpha))
}

/// Samples the exponent curves along a `tan`-spaced grid of order
/// parameters.
///
/// Uses `4·resolution` points `α = tan θ` on `(−∞, ∞)`, plus `α = 0`,
/// `α = 1` and both endpoint limits, sorted by `V`.
pub fn exponent_curve(p: &ProbDist, resolution: usize) -> Result<Vec<ExponentPoint>> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let lm = Landmarks::new(p)?;
    let count = 4 * resolution;
    let step = PI / (count + 1) as f64;

    let mut points: Vec<ExponentPoint> = (1..=count)
        .into_par_iter()
        .filter_map(|k| {
            let alpha = (k as f64 * step - FRAC_PI_2).tan();
            let v = tilt_moments(p, alpha).mean;
            (v > lm.lo + VALUE_TOL && v < lm.hi - VALUE_TOL)
                .then(|| lm.point(p, v, ExtendedAlpha::Finite(alpha)))
        })
        .collect();
    points.push(lm.point(p, lm.lo, ExtendedAlpha::MinusInfinity));
    points.push(lm.point(p, lm.mean_log, ExtendedAlpha::Finite(0.0)));
    points.push(lm.point(p, lm.neg_entropy, ExtendedAlpha::Finite(1.0)));
    points.push(lm.point(p, lm.hi, ExtendedAlpha::PlusInfinity));
    points.sort_by(|x, y| x.value.total_cmp(&y.value));
    points.dedup_by(|x, y| x.value == y.value);
    Ok(points)
}
