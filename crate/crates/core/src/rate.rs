//! Asymptotic exchange rate between tensor powers.
//!
//! The largest `r` with `P^⊗n ⪯ Q^⊗⌊nr⌋` for all large `n` is the minimum of
//! `H_α(P) / H_α(Q)` over `α ∈ [0, ∞]`. The ratio may be multimodal and its
//! minimum may sit at either endpoint, so it is sampled on a dense grid in
//! `θ = arctan α` and every local minimum is refined separately.
//!
//! At `α = 0` the ratio is `log |supp P| / log |supp Q|`, so a rate above one
//! needs a strictly larger support on the left.

use std::f64::consts::FRAC_PI_4;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::dist::ProbDist;
use crate::entropy::{renyi, ExtendedAlpha};
use crate::error::{Error, Result};
use crate::numeric::{golden_section, half_tan_grid};
use crate::oracle::Oracle;

pub const DEFAULT_GRID: usize = 2049;
/// Width in `θ` at which basin refinement stops.
pub const REFINE_TOL: f64 = 1e-10;
/// Basins within this of the minimum are reported as minimisers.
pub const ARGMIN_TOL: f64 = 1e-9;

/// `H_α(P) / H_α(Q)`.
pub fn ratio(p: &ProbDist, q: &ProbDist, alpha: ExtendedAlpha) -> Result<f64> {
    if q.is_trivial() {
        return Err(Error::TrivialTarget);
    }
    let hq = renyi(q, alpha)?;
    let hp = renyi(p, alpha)?;
    if p.is_trivial() {
        return Ok(0.0);
    }
    Ok(hp / hq)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Argmin {
    /// The ratio is constant in `α`.
    Everywhere,
    Points(Vec<ExtendedAlpha>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateStatus {
    ExactSpecialCase,
    GridRefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    /// Nonnegative, or `+inf` for a trivial target.
    pub rate: f64,
    pub argmin: Argmin,
    /// `(α, ratio)` at every grid point.
    pub samples: Vec<(ExtendedAlpha, f64)>,
    pub status: RateStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Number of grid points on `θ ∈ [0, π/2]`, at least 3.
    pub grid: usize,
    pub refine_tol: f64,
    pub argmin_tol: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            refine_tol: REFINE_TOL,
            argmin_tol: ARGMIN_TOL,
        }
    }
}

/// The grid in `θ`, with `θ = π/4` present so that `α = 1` is sampled.
fn theta_grid(count: usize) -> Vec<f64> {
    let mut thetas = half_tan_grid(count);
    match thetas.binary_search_by(|t| t.total_cmp(&FRAC_PI_4)) {
        Ok(_) => {}
        Err(i) => {
            if (thetas[i] - FRAC_PI_4).abs() < 1e-12 {
                thetas[i] = FRAC_PI_4;
            } else if i > 0 && (thetas[i - 1] - FRAC_PI_4).abs() < 1e-12 {
                thetas[i - 1] = FRAC_PI_4;
            } else {
                thetas.insert(i, FRAC_PI_4);
            }
        }
    }
    thetas
}

fn alpha_of(theta: f64, last: f64) -> ExtendedAlpha {
    if theta == 0.0 {
        ExtendedAlpha::Finite(0.0)
    } else if theta == FRAC_PI_4 {
        ExtendedAlpha::Finite(1.0)
    } else if theta >= last {
        ExtendedAlpha::PlusInfinity
    } else {
        ExtendedAlpha::Finite(theta.tan())
    }
}

/// `min_α H_α(P) / H_α(Q)` with the default grid.
pub fn rate(p: &ProbDist, q: &ProbDist) -> RateResult {
    rate_with(p, q, &RateOptions::default()).expect("default options are valid")
}

pub fn rate_with(p: &ProbDist, q: &ProbDist, options: &RateOptions) -> Result<RateResult> {
    if options.grid < 3 {
        return Err(Error::InvalidArgument(
            "rate grid needs at least 3 points".into(),
        ));
    }
    if !(options.refine_tol > 0.0 && options.argmin_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if q.is_trivial() {
        return Ok(RateResult {
            rate: f64::INFINITY,
            argmin: Argmin::Points(Vec::new()),
            samples: Vec::new(),
            status: RateStatus::ExactSpecialCase,
        });
    }

    let thetas = theta_grid(options.grid);
    let last = *thetas.last().unwrap();
    let eval = |theta: f64| ratio(p, q, alpha_of(theta, last)).expect("alpha lies in [0, inf]");
    let values: Vec<f64> = thetas.par_iter().map(|&t| eval(t)).collect();
    let samples: Vec<(ExtendedAlpha, f64)> = thetas
        .iter()
        .zip(&values)
        .map(|(&t, &v)| (alpha_of(t, last), v))
        .collect();

    if p.is_trivial() || (p.is_uniform() && q.is_uniform()) {
        let rate = if p.is_trivial() {
            0.0
        } else {
            (p.support() as f64).log2() / (q.support() as f64).log2()
        };
        return Ok(RateResult {
            rate,
            argmin: Argmin::Everywhere,
            samples,
            status: RateStatus::ExactSpecialCase,
        });
    }

    let grid_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let grid_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if grid_max - grid_min <= options.argmin_tol {
        return Ok(RateResult {
            rate: grid_min,
            argmin: Argmin::Everywhere,
            samples,
            status: RateStatus::GridRefined,
        });
    }

    let len = values.len();
    let mut basins: Vec<(f64, f64)> = Vec::new();
    for i in 0..len {
        let left_ok = i == 0 || values[i] <= values[i - 1];
        let right_ok = i + 1 == len || values[i] <= values[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let a = thetas[i.saturating_sub(1)];
        let b = thetas[(i + 1).min(len - 1)];
        let (theta, value) = golden_section(eval, a, b, options.refine_tol);
        // Grid points include the exact endpoints; prefer them on ties.
        basins.push(if value < values[i] {
            (theta, value)
        } else {
            (thetas[i], values[i])
        });
    }

    let rate = basins.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
    let mut points: Vec<ExtendedAlpha> = Vec::new();
    for &(theta, value) in &basins {
        if value - rate <= options.argmin_tol {
            let alpha = alpha_of(theta, last);
            if !points.contains(&alpha) {
                points.push(alpha);
            }
        }
    }
    Ok(RateResult {
        rate,
        argmin: Argmin::Points(points),
        samples,
        status: RateStatus::GridRefined,
    })
}

/// Outcome of comparing the entropy criterion with direct majorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainStatus {
    Consistent,
    /// Entropies are strictly ordered but no `n ≤ n_max` was found.
    Inconclusive,
    /// Majorization held somewhere without strict entropy dominance.
    Violation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// `H_α(P) > H_α(Q)` on the whole grid, endpoints included.
    pub strict_everywhere: bool,
    pub first_n: Option<u32>,
    /// Strict dominance on sampled `α ∈ (0, ∞)` wherever majorization holds.
    pub necessary_ok: bool,
    /// `holds[k]` is the verdict of `P^⊗(k+1) ⪯ Q^⊗(k+1)`.
    pub holds: Vec<bool>,
    pub status: ChainStatus,
}

/// Orders at which strictness is required of a majorizing pair.
fn interior_alphas() -> Vec<f64> {
    (-24..=24).map(|k| 2f64.powf(f64::from(k) / 4.0)).collect()
}

/// Checks strict Rényi dominance against `P^⊗n ⪯ Q^⊗n` for `n ≤ n_max`.
pub fn chain_check(p: &ProbDist, q: &ProbDist, n_max: u32, oracle: &Oracle) -> Result<ChainReport> {
    if p.same_sorted(q) {
        return Err(Error::DegenerateChain);
    }
    let strictly_above =
        |alpha: ExtendedAlpha| -> Result<bool> { Ok(renyi(p, alpha)? > renyi(q, alpha)?) };

    let thetas = theta_grid(257);
    let last = *thetas.last().unwrap();
    let mut strict_everywhere = true;
    for &t in &thetas {
        if !strictly_above(alpha_of(t, last))? {
            strict_everywhere = false;
            break;
        }
    }

    let scan = oracle.min_power(p, q, Ratio::from_integer(1), n_max)?;
    let necessary_ok = if scan.first.is_some() {
        let mut ok = true;
        for a in interior_alphas() {
            ok &= strictly_above(ExtendedAlpha::Finite(a))?;
        }
        ok
    } else {
        true
    };
    let status = if !necessary_ok {
        ChainStatus::Violation
    } else if strict_everywhere && scan.first.is_none() {
        ChainStatus::Inconclusive
    } else {
        ChainStatus::Consistent
    };
    Ok(ChainReport {
        strict_everywhere,
        first_n: scan.first,
        necessary_ok,
        holds: scan.holds,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Direction;
    use proptest::prelude::*;

    fn pd(w: &[f64]) -> ProbDist {
        ProbDist::new(w).unwrap()
    }

    #[test]
    fn theta_grid_contains_unity() {
        for count in [3, 4, 5, 10, 2049] {
            let g = theta_grid(count);
            assert!(g.contains(&FRAC_PI_4));
            assert_eq!(g[0], 0.0);
            assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn ratio_examples() {
        let p = pd(&[0.7, 0.2, 0.1]);
        for a in [0.0, 0.5, 1.0, 3.0] {
            assert_eq!(ratio(&p, &p, a.into()).unwrap(), 1.0);
            let r = ratio(&ProbDist::uniform(2), &ProbDist::uniform(4), a.into()).unwrap();
            assert!((r - 0.5).abs() < 1e-15);
        }
        let r = ratio(
            &pd(&[0.9, 0.1]),
            &ProbDist::uniform(2),
            ExtendedAlpha::PlusInfinity,
        )
        .unwrap();
        assert!((r - 0.15200).abs() < 5e-6);
        assert_eq!(ratio(&ProbDist::trivial(), &p, 2.0.into()).unwrap(), 0.0);
        assert_eq!(
            ratio(&p, &ProbDist::trivial(), 2.0.into()),
            Err(Error::TrivialTarget)
        );
    }

    #[test]
    fn special_cases() {
        let r = rate(&ProbDist::uniform(4), &ProbDist::uniform(2));
        assert_eq!(r.rate, 2.0);
        assert_eq!(r.argmin, Argmin::Everywhere);
        assert_eq!(r.status, RateStatus::ExactSpecialCase);

        let r = rate(&pd(&[0.5, 0.5]), &ProbDist::trivial());
        assert_eq!(r.rate, f64::INFINITY);
        assert_eq!(r.argmin, Argmin::Points(vec![]));

        let r = rate(&ProbDist::trivial(), &pd(&[0.6, 0.4]));
        assert_eq!(r.rate, 0.0);
    }

    #[test]
    fn minimum_at_infinity() {
        let r = rate(&pd(&[0.9, 0.1]), &ProbDist::uniform(2));
        assert!((r.rate + 0.9f64.log2()).abs() < 1e-12);
        assert_eq!(r.argmin, Argmin::Points(vec![ExtendedAlpha::PlusInfinity]));
        assert_eq!(r.status, RateStatus::GridRefined);
    }

    #[test]
    fn minimum_at_zero() {
        let r = rate(&pd(&[0.6, 0.4]), &pd(&[0.75, 0.25]));
        assert_eq!(r.rate, 1.0);
        assert_eq!(r.argmin, Argmin::Points(vec![ExtendedAlpha::Finite(0.0)]));
    }

    #[test]
    fn self_rate_is_one_everywhere() {
        let p = pd(&[0.5, 0.3, 0.15, 0.05]);
        let r = rate(&p, &p);
        assert_eq!(r.rate, 1.0);
        assert_eq!(r.argmin, Argmin::Everywhere);
    }

    #[test]
    fn interior_minimum_is_refined() {
        // The ratio is about 1.465 at α = 0, 1.515 at α = ∞ and dips to
        // about 1.3216 near α = 2.96.
        let p = pd(&[0.35, 0.35, 0.1, 0.1, 0.1]);
        let q = pd(&[0.5, 0.3, 0.2]);
        let r = rate(&p, &q);
        let Argmin::Points(points) = &r.argmin else {
            panic!()
        };
        assert_eq!(points.len(), 1);
        let a = points[0].to_f64();
        assert!((a - 2.96).abs() < 0.05, "{a}");
        assert!((r.rate - 1.3216).abs() < 1e-4);
        let at = |x: f64| ratio(&p, &q, x.into()).unwrap();
        assert!((at(a) - r.rate).abs() < 1e-12);
        assert!(at(a * 1.01) >= r.rate && at(a / 1.01) >= r.rate);
        for (_, v) in &r.samples {
            assert!(*v >= r.rate - 1e-12);
        }
    }

    #[test]
    fn stable_under_grid_doubling() {
        let pairs = [
            (pd(&[0.4, 0.3, 0.2, 0.1]), pd(&[0.55, 0.45])),
            (pd(&[0.9, 0.1]), ProbDist::uniform(2)),
            (pd(&[0.6, 0.4]), pd(&[0.75, 0.25])),
            (pd(&[0.35, 0.35, 0.1, 0.1, 0.1]), pd(&[0.5, 0.3, 0.2])),
        ];
        for (p, q) in &pairs {
            let base = rate(p, q).rate;
            let fine = rate_with(
                p,
                q,
                &RateOptions {
                    grid: 4097,
                    ..RateOptions::default()
                },
            )
            .unwrap();
            assert!((base - fine.rate).abs() < 1e-9, "{base} vs {}", fine.rate);
        }
    }

    #[test]
    fn invalid_options() {
        let p = pd(&[0.6, 0.4]);
        let bad = RateOptions {
            grid: 2,
            ..RateOptions::default()
        };
        assert!(rate_with(&p, &p, &bad).is_err());
    }

    #[test]
    fn chain_examples() {
        let o = Oracle::default();
        let c = chain_check(&pd(&[0.4, 0.3, 0.2, 0.1]), &pd(&[0.5, 0.3, 0.2]), 3, &o).unwrap();
        assert!(c.strict_everywhere);
        assert_eq!(c.first_n, Some(1));
        assert!(c.necessary_ok);
        assert_eq!(c.status, ChainStatus::Consistent);

        let c = chain_check(&pd(&[0.9, 0.1]), &pd(&[0.8, 0.2]), 8, &o).unwrap();
        assert!(!c.strict_everywhere);
        assert_eq!(c.first_n, None);
        assert_eq!(c.status, ChainStatus::Consistent);

        let p = pd(&[0.5, 0.3, 0.2]);
        let shuffled = ProbDist::normalized(&[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(
            chain_check(&p, &shuffled, 3, &o),
            Err(Error::DegenerateChain)
        );
    }

    #[test]
    fn chain_inconclusive_when_n_max_too_small() {
        // Strictly ordered entropies, but a single copy is not majorized.
        let p = pd(&[0.4, 0.4, 0.1, 0.1]);
        let q = pd(&[0.5, 0.25, 0.25]);
        let o = Oracle::default();
        let c = chain_check(&p, &q, 1, &o).unwrap();
        assert!(c.strict_everywhere);
        assert_eq!(c.first_n, None);
        assert_eq!(c.status, ChainStatus::Inconclusive);
    }

    fn arb_dist() -> impl Strategy<Value = ProbDist> {
        prop::collection::vec(0.02f64..1.0, 2..6).prop_map(|w| ProbDist::normalized(&w).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scales_with_tensor_power(p in arb_dist(), q in arb_dist(), k in 2u32..=3) {
            prop_assume!(!(p.is_uniform() && q.is_uniform()));
            let base = rate(&p, &q).rate;
            let scaled = rate(&p.tensor_power(k), &q).rate;
            prop_assert!((scaled - f64::from(k) * base).abs() < 1e-8, "{scaled} vs {k}·{base}");
        }

        #[test]
        fn permutation_invariant(w in prop::collection::vec(0.02f64..1.0, 2..6), q in arb_dist()) {
            let p = ProbDist::normalized(&w).unwrap();
            let mut reversed = w.clone();
            reversed.reverse();
            let p_rev = ProbDist::normalized(&reversed).unwrap();
            prop_assert_eq!(rate(&p, &q).rate, rate(&p_rev, &q).rate);
        }

        #[test]
        fn sharpened_target_rate_at_least_one(p in arb_dist(), frac in 0.1f64..0.9) {
            prop_assume!(!p.is_uniform());
            let q = p.perturb(p.min_weight() * frac, Direction::Sharpen).unwrap();
            let r = rate(&p, &q).rate;
            prop_assert!(r >= 1.0 - 1e-12);
        }
    }
}
