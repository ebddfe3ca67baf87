//! Stationary laws: product form, linear solve, and the intersection model.

use crate::error::{Error, Result};
use crate::linalg;
use crate::process::{check_probabilities, IntersectionModel};
use crate::scalar::Scalar;
use crate::spectral::{check_dense, TransitionMatrix};

/// Largest `m` for which product-form laws are enumerated.
pub const MAX_PRODUCT_EDGES: usize = 20;

/// `π(E) = ∏_{e∈E} p_e ∏_{e∉E} (1 - p_e)` for the state with bitmask `state`.
pub fn product_weight<S: Scalar>(p: &[S], state: u64) -> S {
    p.iter().enumerate().fold(S::one(), |acc, (e, pe)| {
        if state >> e & 1 == 1 {
            acc * pe.clone()
        } else {
            acc * (S::one() - pe.clone())
        }
    })
}

/// Product-form law over all `2^m` states in bitmask order.
pub fn stationary_closed_form<S: Scalar>(p: &[S]) -> Result<Vec<S>> {
    check_probabilities(p)?;
    let m = p.len();
    if m > MAX_PRODUCT_EDGES {
        return Err(Error::CapExceeded { what: "edges for an enumerated law", needed: m as u128, cap: MAX_PRODUCT_EDGES as u128 });
    }
    Ok((0..1u64 << m).map(|s| product_weight(p, s)).collect())
}

/// Solves `π P = π`, `Σ π = 1` directly.
pub fn stationary_solve<S: Scalar>(chain: &TransitionMatrix<S>) -> Result<Vec<S>> {
    let n = chain.len();
    check_dense(n)?;
    // rows of (P - I)^T, with the last equation replaced by normalization
    let mut a = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for (j, w) in chain.row(i) {
            a[*j][i] = a[*j][i].clone() + w.clone();
        }
        a[i][i] = a[i][i].clone() - S::one();
    }
    a[n - 1] = vec![S::one(); n];
    let mut b = vec![S::zero(); n];
    b[n - 1] = S::one();
    linalg::solve(a, b).ok_or(Error::NotIrreducible)
}

/// `max_j |(π P)_j - π_j|`.
pub fn stationary_residual<S: Scalar>(pi: &[S], chain: &TransitionMatrix<S>) -> Result<S> {
    if pi.len() != chain.len() {
        return Err(Error::LengthMismatch(pi.len(), chain.len()));
    }
    Ok(max_abs(chain.left_mul(pi).into_iter().zip(pi).map(|(a, b)| a - b.clone())))
}

/// `max_{E,F} |π(E) P(E,F) - π(F) P(F,E)|`.
pub fn detailed_balance_residual<S: Scalar>(pi: &[S], chain: &TransitionMatrix<S>) -> Result<S> {
    if pi.len() != chain.len() {
        return Err(Error::LengthMismatch(pi.len(), chain.len()));
    }
    let mut worst = S::zero();
    for i in 0..chain.len() {
        for (j, w) in chain.row(i) {
            let d = (pi[i].clone() * w.clone() - pi[*j].clone() * chain.entry(*j, i)).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

pub(crate) fn max_abs<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().map(|v| v.abs()).fold(S::zero(), |a, b| if b > a { b } else { a })
}

/// Law of the intersection model over all `2^{nN}` states: each ground
/// symbol's neighbourhood size is drawn from `mu`, then a uniform subset of
/// that size, independently across symbols.
pub fn intersection_stationary<S: Scalar>(model: &IntersectionModel<S>) -> Result<Vec<S>> {
    let m = model.edge_count();
    if m > MAX_PRODUCT_EDGES {
        return Err(Error::CapExceeded { what: "edges for an enumerated law", needed: m as u128, cap: MAX_PRODUCT_EDGES as u128 });
    }
    let n_attr = model.attributes;
    let block = (1u64 << n_attr) - 1;
    let per_vertex: Vec<S> = (0..=n_attr).map(|k| model.weight(k) * S::from_usize(model.ground)).collect();
    Ok((0..1u64 << m)
        .map(|s| {
            (0..model.ground).fold(S::one(), |acc, v| {
                let k = (s >> (v * n_attr) & block).count_ones() as usize;
                acc * per_vertex[k].clone()
            })
        })
        .collect())
}
