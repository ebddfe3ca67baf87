//! Transition matrices over enumerated states.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::edits::MaskEdit;
use crate::error::{Error, Result};
use crate::hostgraph::{EdgeSet, MAX_ENUM_EDGES};
use crate::process::WeightedEdits;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restrict {
    /// All `2^m` states, ordered by bitmask.
    All,
    /// The closed communicating class, ordered by bitmask.
    Recurrent,
}

/// Row-stochastic matrix over bitmask states. Rows are stored sparsely and
/// sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<S> {
    m: usize,
    states: Vec<u64>,
    lookup: HashMap<u64, usize>,
    rows: Vec<Vec<(usize, S)>>,
}

/// States of the closed class, with edges no generator touches.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrentClass {
    pub states: Vec<u64>,
    pub frozen: EdgeSet,
}

impl RecurrentClass {
    pub fn covers_host(&self) -> bool {
        self.frozen.is_empty()
    }

    pub fn contains(&self, state: u64) -> bool {
        self.states.binary_search(&state).is_ok()
    }
}

fn mask_edits<S: Scalar>(dist: &WeightedEdits<S>, cap: usize) -> Result<Vec<(MaskEdit, S)>> {
    let m = dist.universe();
    if m > MAX_ENUM_EDGES {
        return Err(Error::CapExceeded { what: "edges for state enumeration", needed: m as u128, cap: MAX_ENUM_EDGES as u128 });
    }
    dist.explicit_items(cap)?
        .iter()
        .map(|(e, w)| Ok((e.to_mask_edit()?, w.clone())))
        .collect()
}

/// Closed class reached from `initial`: apply every generator once, then close
/// under generator applications.
pub fn recurrent_class<S: Scalar>(dist: &WeightedEdits<S>, initial: &EdgeSet, cap: usize) -> Result<RecurrentClass> {
    let edits = mask_edits(dist, cap)?;
    recurrent_from_masks(dist.universe(), &edits, initial, cap)
}

fn recurrent_from_masks<S>(m: usize, edits: &[(MaskEdit, S)], initial: &EdgeSet, cap: usize) -> Result<RecurrentClass> {
    initial.check_same_host(&EdgeSet::empty(m))?;
    let covered = edits.iter().fold(0u64, |acc, (x, _)| acc | x.support());
    let frozen = EdgeSet::from_mask(m, !covered & full_mask(m))?;
    let start = edits.iter().rev().fold(initial.mask(), |s, (x, _)| x.apply(s));
    let mut seen = HashMap::new();
    seen.insert(start, ());
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for (x, _) in edits {
            let t = x.apply(s);
            if !seen.contains_key(&t) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded { what: "recurrent states", needed: seen.len() as u128 + 1, cap: cap as u128 });
                }
                seen.insert(t, ());
                queue.push_back(t);
            }
        }
    }
    let mut states: Vec<u64> = seen.into_keys().collect();
    states.sort_unstable();
    Ok(RecurrentClass { states, frozen })
}

fn full_mask(m: usize) -> u64 {
    if m == 64 { u64::MAX } else { (1u64 << m) - 1 }
}

/// `P(E, F) = Σ_{x : xE = F} w_x`. In `Recurrent` mode the walk is started
/// from the empty graph.
pub fn build_chain<S: Scalar>(dist: &WeightedEdits<S>, restrict: Restrict, cap: usize) -> Result<TransitionMatrix<S>> {
    let m = dist.universe();
    let edits = mask_edits(dist, cap)?;
    let states = match restrict {
        Restrict::All => {
            if m >= 64 || (1u128 << m) > cap as u128 {
                return Err(Error::CapExceeded { what: "states", needed: 1u128 << m.min(127), cap: cap as u128 });
            }
            (0..1u64 << m).collect()
        }
        Restrict::Recurrent => recurrent_from_masks(m, &edits, &EdgeSet::empty(m), cap)?.states,
    };
    Ok(TransitionMatrix::from_masks(m, states, &edits))
}

impl<S: Scalar> TransitionMatrix<S> {
    fn from_masks(m: usize, states: Vec<u64>, edits: &[(MaskEdit, S)]) -> Self {
        let lookup: HashMap<u64, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let rows = states
            .par_iter()
            .map(|&s| {
                let mut row: Vec<(usize, S)> = edits
                    .iter()
                    .map(|(x, w)| (lookup[&x.apply(s)], w.clone()))
                    .collect();
                row.sort_by_key(|&(j, _)| j);
                let mut merged: Vec<(usize, S)> = Vec::with_capacity(row.len());
                for (j, w) in row {
                    match merged.last_mut() {
                        Some((k, acc)) if *k == j => *acc = acc.clone() + w,
                        _ => merged.push((j, w)),
                    }
                }
                merged
            })
            .collect();
        Self { m, states, lookup, rows }
    }

    /// Matrix from dense rows over the given states. Does not check
    /// stochasticity.
    pub fn from_dense(m: usize, states: Vec<u64>, dense: Vec<Vec<S>>) -> Result<Self> {
        if dense.len() != states.len() {
            return Err(Error::LengthMismatch(dense.len(), states.len()));
        }
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut rows = Vec::with_capacity(dense.len());
        for r in dense {
            if r.len() != states.len() {
                return Err(Error::LengthMismatch(r.len(), states.len()));
            }
            rows.push(r.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
        }
        Ok(Self { m, states, lookup, rows })
    }

    pub fn universe(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, i: usize) -> EdgeSet {
        EdgeSet::from_mask(self.m, self.states[i]).expect("state fits the host")
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.lookup.get(&state).copied()
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> S {
        match self.rows[i].binary_search_by_key(&j, |&(k, _)| k) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let n = self.len();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![S::zero(); n];
                for (j, w) in row {
                    dense[*j] = w.clone();
                }
                dense
            })
            .collect()
    }

    /// Dense matrix with rows and columns in the given state order.
    pub fn to_dense_in(&self, order: &[u64]) -> Result<Vec<Vec<S>>> {
        let idx: Vec<usize> = order
            .iter()
            .map(|s| self.index_of(*s).ok_or_else(|| Error::UnknownState(format!("{s:#x}"))))
            .collect::<Result<_>>()?;
        Ok(idx.iter().map(|&i| idx.iter().map(|&j| self.entry(i, j)).collect()).collect())
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            if v[i].is_zero() {
                continue;
            }
            for (j, w) in row {
                out[*j] = out[*j].clone() + v[i].clone() * w.clone();
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(S::zero(), |acc, (j, w)| acc + w.clone() * v[*j].clone()))
            .collect()
    }

    /// Largest `|Σ_j P(i, j) - 1|`.
    pub fn stochasticity_residual(&self) -> S {
        self.rows
            .iter()
            .map(|row| (row.iter().fold(S::zero(), |a, (_, w)| a + w.clone()) - S::one()).abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn to_f64(&self) -> TransitionMatrix<f64> {
        TransitionMatrix {
            m: self.m,
            states: self.states.clone(),
            lookup: self.lookup.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(|(j, w)| (*j, w.to_f64())).collect()).collect(),
        }
    }

    /// Positive off-diagonal transitions as `(from, to, probability)`.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |(j, _)| *j != i).map(move |(j, w)| (i, *j, w)))
    }
}

/// States in chamber notation order: edge `0` is the leading letter, so for
/// two edges the order is `(ab, a, b, ∅)`.
pub fn chamber_notation_order(m: usize) -> Vec<u64> {
    let top = full_mask(m);
    (0..=top)
        .map(|k| {
            let s = top - k;
            (0..m).filter(|&i| s >> (m - 1 - i) & 1 == 1).fold(0u64, |acc, i| acc | 1 << i)
        })
        .collect()
}
