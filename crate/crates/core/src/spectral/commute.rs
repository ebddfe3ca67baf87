//! Hitting and commute times.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg;
use crate::process::check_probabilities;
use crate::scalar::Scalar;
use crate::spectral::eigen::{phi_ratio, symmetrized};
use crate::spectral::stationary::MAX_PRODUCT_EDGES;
use crate::spectral::{check_dense, TransitionMatrix};

/// One subset's contribution to the simple-process commute time.
#[derive(Clone, Debug, PartialEq)]
pub struct CommuteTerm<S> {
    pub subset: u64,
    /// `T ∩ (E △ F) ≠ ∅`.
    pub meets_difference: bool,
    /// `E △ F ⊄ T`. Terms without this property are exactly zero, since
    /// `φ_T(E)/π(E)` only depends on `E ∖ T`.
    pub contributes: bool,
    pub value: S,
}

/// Every term `T ≠ 𝓔` of
/// `m/(m-|T|) ∏_{e∉T} p_e(1-p_e) (φ_T(E)/π(E) - φ_T(F)/π(F))²`.
pub fn commute_terms<S: Scalar>(e: u64, f: u64, p: &[S]) -> Result<Vec<CommuteTerm<S>>> {
    let m = p.len();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    if m > MAX_PRODUCT_EDGES {
        return Err(Error::CapExceeded { what: "edges for commute terms", needed: m as u128, cap: MAX_PRODUCT_EDGES as u128 });
    }
    check_probabilities(p)?;
    let top = (1u64 << m) - 1;
    if (e | f) & !top != 0 {
        return Err(Error::UnknownState(format!("{:#x}", e | f)));
    }
    let variance: Vec<S> = p.iter().map(|pe| pe.clone() * (S::one() - pe.clone())).collect();
    Ok((0..top)
        .map(|t| {
            let k = t.count_ones() as usize;
            let weight = (0..m)
                .filter(|&i| t >> i & 1 == 0)
                .fold(S::from_ratio(m as i64, (m - k) as i64), |acc, i| acc * variance[i].clone());
            let diff = phi_ratio(t, e, p) - phi_ratio(t, f, p);
            CommuteTerm {
                subset: t,
                meets_difference: t & (e ^ f) != 0,
                contributes: (e ^ f) & !t != 0,
                value: weight * diff.clone() * diff,
            }
        })
        .collect())
}

/// Commute time of the simple edit process from its closed form, summing only
/// the subsets that do not contain `E △ F`.
pub fn commute_time_simple<S: Scalar>(e: u64, f: u64, p: &[S]) -> Result<S> {
    Ok(commute_terms(e, f, p)?
        .into_iter()
        .filter(|t| t.contributes)
        .fold(S::zero(), |acc, t| acc + t.value))
}

/// Expected hitting times of state `target` from every state, by first-step
/// analysis: `(I - P) h = 1` off the target, `h(target) = 0`.
pub fn hitting_times_to<S: Scalar>(chain: &TransitionMatrix<S>, target: usize) -> Result<Vec<S>> {
    let n = chain.len();
    check_dense(n)?;
    if target >= n {
        return Err(Error::InvalidArgument(format!("target index {target} out of range")));
    }
    let reduce = |i: usize| if i < target { i } else { i - 1 };
    let mut a = vec![vec![S::zero(); n - 1]; n - 1];
    for i in (0..n).filter(|&i| i != target) {
        let r = reduce(i);
        a[r][r] = S::one();
        for (j, w) in chain.row(i) {
            if *j != target {
                let c = reduce(*j);
                a[r][c] = a[r][c].clone() - w.clone();
            }
        }
    }
    let h = linalg::solve(a, vec![S::one(); n - 1]).ok_or(Error::NotIrreducible)?;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&h[..target]);
    out.push(S::zero());
    out.extend_from_slice(&h[target..]);
    Ok(out)
}

/// `H(x, y) + H(y, x)` by linear solves.
pub fn commute_time_linear<S: Scalar>(chain: &TransitionMatrix<S>, x: usize, y: usize) -> Result<S> {
    if x == y {
        return Ok(S::zero());
    }
    Ok(hitting_times_to(chain, y)?[x].clone() + hitting_times_to(chain, x)?[y].clone())
}

/// Hitting and commute times of a reversible chain from a numerical
/// eigendecomposition of `Q = Π^{1/2} P Π^{-1/2}`.
#[derive(Clone, Debug)]
pub struct SpectralHitting {
    eigenvalues: Vec<f64>,
    // right eigenvectors f_k = ψ_k / √π, one per column block
    vectors: Vec<Vec<f64>>,
}

impl SpectralHitting {
    pub fn new(chain: &TransitionMatrix<f64>, pi: &[f64]) -> Result<Self> {
        let q = symmetrized(chain, pi)?;
        let asym = (&q - q.transpose()).amax();
        if asym > 1e-9 {
            return Err(Error::NotReversible(asym));
        }
        let eig = SymmetricEigen::new((&q + q.transpose()) * 0.5);
        let n = chain.len();
        // the stationary direction has eigenvalue 1; drop the one closest to it
        let stationary = (0..n)
            .max_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite"))
            .ok_or(Error::NotIrreducible)?;
        let mut eigenvalues = Vec::with_capacity(n.saturating_sub(1));
        let mut vectors = Vec::with_capacity(n.saturating_sub(1));
        for k in (0..n).filter(|&k| k != stationary) {
            let lambda = eig.eigenvalues[k];
            if 1.0 - lambda < 1e-12 {
                return Err(Error::NotIrreducible);
            }
            eigenvalues.push(lambda);
            vectors.push((0..n).map(|i| eig.eigenvectors[(i, k)] / pi[i].sqrt()).collect());
        }
        Ok(Self { eigenvalues, vectors })
    }

    /// `H(x, y) = Σ_k 1/(1-λ_k) f_k(y) (f_k(y) - f_k(x))`; each term is
    /// invariant under the sign of `f_k`.
    pub fn hitting(&self, x: usize, y: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.vectors)
            .map(|(l, f)| f[y] * (f[y] - f[x]) / (1.0 - l))
            .sum()
    }

    pub fn commute(&self, x: usize, y: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.vectors)
            .map(|(l, f)| (f[x] - f[y]).powi(2) / (1.0 - l))
            .sum()
    }
}
