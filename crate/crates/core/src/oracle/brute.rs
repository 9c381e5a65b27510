//! Majorization by full enumeration of tensor-power atoms.

use num_bigint::BigUint;

use super::MajorizationVerdict;
use crate::dist::ProbDist;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Largest number of atoms enumerated per side.
pub const BRUTE_CAP: u64 = 1 << 20;

fn atom_count(d: usize, n: u32) -> Option<u64> {
    (d as u64).checked_pow(n).filter(|&c| c <= BRUTE_CAP)
}

/// All atoms of `P^⊗n`, sorted non-increasingly.
pub fn tensor_atoms(p: &ProbDist, n: u32) -> Result<Vec<f64>> {
    if atom_count(p.support(), n).is_none() {
        return Err(Error::BudgetExceeded {
            states: num_traits::Pow::pow(BigUint::from(p.support()), n),
            budget: BRUTE_CAP,
        });
    }
    let mut atoms = vec![1.0];
    for _ in 0..n {
        atoms = atoms
            .iter()
            .flat_map(|&a| p.weights().iter().map(move |&w| a * w))
            .collect();
    }
    atoms.sort_by(|a, b| b.total_cmp(a));
    Ok(atoms)
}

/// `(head, tail)` sums for every prefix length `0..=len`.
fn prefix_sums(atoms: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut head = Vec::with_capacity(atoms.len() + 1);
    let mut sum = NeumaierSum::new();
    head.push(0.0);
    for &a in atoms {
        sum += a;
        head.push(sum.value());
    }
    let mut tail = vec![0.0; atoms.len() + 1];
    let mut sum = NeumaierSum::new();
    for i in (0..atoms.len()).rev() {
        sum += atoms[i];
        tail[i] = sum.value();
    }
    (head, tail)
}

/// Checks `P^⊗n ⪯ Q^⊗m` at every prefix length.
pub fn brute_majorizes(
    p: &ProbDist,
    n: u32,
    q: &ProbDist,
    m: u32,
    tolerance: f64,
) -> Result<MajorizationVerdict> {
    let pa = tensor_atoms(p, n)?;
    let qa = tensor_atoms(q, m)?;
    let (ph, pt) = prefix_sums(&pa);
    let (qh, qt) = prefix_sums(&qa);
    let at = |h: &[f64], t: &[f64], i: usize| {
        if i < h.len() {
            (h[i], t[i])
        } else {
            (1.0, 0.0)
        }
    };

    let mut margin = f64::INFINITY;
    let mut witness = None;
    for i in 1..=pa.len().max(qa.len()) {
        let (p_head, p_tail) = at(&ph, &pt, i);
        let (q_head, q_tail) = at(&qh, &qt, i);
        let gap = if q_head <= 0.5 && p_head <= 0.5 {
            q_head - p_head
        } else {
            p_tail - q_tail
        };
        if i <= pa.len() {
            margin = margin.min(gap);
        }
        if witness.is_none() && gap < -tolerance {
            witness = Some(i);
        }
    }
    if witness.is_none() && qa.len() > pa.len() {
        witness = Some(pa.len());
    }
    Ok(MajorizationVerdict {
        holds: witness.is_none(),
        witness: witness.map(BigUint::from),
        margin,
    })
}
