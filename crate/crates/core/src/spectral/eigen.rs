//! Closed-form and numeric eigen-systems.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hostgraph::EdgeSet;
use crate::lattice::{SpectrumEntry, SpectrumReport, SupportLattice};
use crate::process::{check_probabilities, WeightedEdits};
use crate::scalar::Scalar;
use crate::spectral::stationary::{max_abs, product_weight, MAX_PRODUCT_EDGES};
use crate::spectral::{check_dense, recurrent_class, RecurrentClass, TransitionMatrix};

fn check_edges(m: usize) -> Result<()> {
    if m > MAX_PRODUCT_EDGES {
        return Err(Error::CapExceeded { what: "edges for an enumerated spectrum", needed: m as u128, cap: MAX_PRODUCT_EDGES as u128 });
    }
    Ok(())
}

/// Subsets of `m` edges as bitmasks, by size and then numerically.
pub fn subsets_by_size(m: usize) -> Vec<u64> {
    let mut all: Vec<u64> = (0..1u64 << m).collect();
    all.sort_by_key(|&t| (t.count_ones(), t));
    all
}

/// Simple edit process: `λ_T = |T|/m`, multiplicity one per subset `T`.
pub fn eigenvalues_simple<S: Scalar>(m: usize) -> Result<SpectrumReport<S>> {
    check_edges(m)?;
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let entries = subsets_by_size(m)
        .into_iter()
        .map(|t| SpectrumEntry {
            flat: EdgeSet::from_mask(m, t).expect("subset of the host"),
            eigenvalue: S::from_ratio(t.count_ones() as i64, m as i64),
            multiplicity: 1,
        })
        .collect();
    Ok(SpectrumReport { entries, chambers: 1 << m, frozen: EdgeSet::empty(m) })
}

/// Lattice spectrum on the recurrent class reached from the empty graph.
pub fn compound_spectrum<S: Scalar>(
    dist: &WeightedEdits<S>,
    cap: usize,
) -> Result<(SupportLattice, RecurrentClass, SpectrumReport<S>)> {
    let m = dist.universe();
    let lattice = SupportLattice::of_distribution(dist)?;
    let class = recurrent_class(dist, &EdgeSet::empty(m), cap)?;
    let states: Vec<EdgeSet> = class.states.iter().map(|&s| EdgeSet::from_mask(m, s)).collect::<Result<_>>()?;
    let report = lattice.spectrum_on_states(dist, &states, cap)?;
    Ok((lattice, class, report))
}

/// `φ_T(E) / π(E) = ∏_{e∉T} (1/p_e if e ∈ E, else -1/(1-p_e))`.
pub fn phi_ratio<S: Scalar>(t: u64, state: u64, p: &[S]) -> S {
    (0..p.len()).filter(|&e| t >> e & 1 == 0).fold(S::one(), |acc, e| {
        if state >> e & 1 == 1 {
            acc / p[e].clone()
        } else {
            -(acc / (S::one() - p[e].clone()))
        }
    })
}

/// `φ_T(E) = (-1)^{|𝓔∖(E∪T)|} ∏_{e∈T∩E} p_e ∏_{e∈T∖E} (1-p_e)` at one state.
pub fn phi_at<S: Scalar>(t: u64, state: u64, p: &[S]) -> S {
    let mut acc = S::one();
    for (e, pe) in p.iter().enumerate() {
        let in_t = t >> e & 1 == 1;
        let in_e = state >> e & 1 == 1;
        acc = match (in_t, in_e) {
            (true, true) => acc * pe.clone(),
            (true, false) => acc * (S::one() - pe.clone()),
            (false, true) => acc,
            (false, false) => -acc,
        };
    }
    acc
}

/// Left eigenvector `φ_T` of the simple process over all states in bitmask
/// order, with eigenvalue `|T|/m`.
pub fn phi<S: Scalar>(t: &EdgeSet, p: &[S]) -> Result<Vec<S>> {
    let m = p.len();
    check_edges(m)?;
    check_probabilities(p)?;
    let tm = t.try_mask()?;
    if t.universe() != m {
        return Err(Error::LengthMismatch(t.universe(), m));
    }
    Ok((0..1u64 << m).map(|s| phi_at(tm, s, p)).collect())
}

/// Orthonormal eigenvector `ψ_T` of `Q = Π^{1/2} P Π^{-1/2}`.
pub fn psi(t: &EdgeSet, p: &[f64]) -> Result<Vec<f64>> {
    let tm = t.try_mask()?;
    let scale: f64 = (0..p.len())
        .filter(|&e| tm >> e & 1 == 0)
        .map(|e| (p[e] * (1.0 - p[e])).sqrt())
        .product();
    Ok(phi(t, p)?
        .into_iter()
        .enumerate()
        .map(|(s, v)| v * scale / product_weight(p, s as u64).sqrt())
        .collect())
}

/// `max_j |(v P)_j - λ v_j|`.
pub fn left_eigen_residual<S: Scalar>(v: &[S], chain: &TransitionMatrix<S>, lambda: &S) -> Result<S> {
    if v.len() != chain.len() {
        return Err(Error::LengthMismatch(v.len(), chain.len()));
    }
    let vp = chain.left_mul(v);
    Ok(max_abs(vp.into_iter().zip(v).map(|(a, b)| a - lambda.clone() * b.clone())))
}

/// `Q = Π^{1/2} P Π^{-1/2}` as a dense matrix.
pub fn symmetrized(chain: &TransitionMatrix<f64>, pi: &[f64]) -> Result<DMatrix<f64>> {
    let n = chain.len();
    check_dense(n)?;
    if pi.len() != n {
        return Err(Error::LengthMismatch(pi.len(), n));
    }
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for &(j, w) in chain.row(i) {
            q[(i, j)] = (pi[i] / pi[j]).sqrt() * w;
        }
    }
    Ok(q)
}

/// Eigenvalues of a dense chain, descending. With a stationary law `pi` the
/// symmetric form `Q` is diagonalized (the chain must be reversible);
/// otherwise a real Schur decomposition is used and imaginary parts dropped.
pub fn numeric_eigenvalues(chain: &TransitionMatrix<f64>, pi: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = chain.len();
    check_dense(n)?;
    let mut values: Vec<f64> = match pi {
        Some(pi) => {
            let q = symmetrized(chain, pi)?;
            let asym = (&q - q.transpose()).amax();
            if asym > 1e-9 {
                return Err(Error::NotReversible(asym));
            }
            let q = (&q + q.transpose()) * 0.5;
            SymmetricEigen::new(q).eigenvalues.iter().copied().collect()
        }
        None => {
            let dense = chain.to_dense();
            let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
            a.complex_eigenvalues().iter().map(|z| z.re).collect()
        }
    };
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumComparison {
    pub expected_len: usize,
    pub numeric_len: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Sorts both multisets and compares them elementwise. A length mismatch
/// fails regardless of tolerance.
pub fn compare_spectra(expected: &[f64], numeric: &[f64], tol: f64) -> SpectrumComparison {
    let mut a = expected.to_vec();
    let mut b = numeric.to_vec();
    a.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    b.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    let max_deviation = if a.len() == b.len() {
        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    SpectrumComparison { expected_len: a.len(), numeric_len: b.len(), max_deviation, passed: max_deviation <= tol }
}
