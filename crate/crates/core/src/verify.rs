//! Oracle suite: closed forms against brute-force constructions.

use serde::Serialize;

use crate::error::Result;
use crate::linalg;
use crate::hostgraph::{EdgeSet, HostGraph};
use crate::process::{rng_for, simple_edit_weights, WeightedEdits};
use crate::scalar::Scalar;
use crate::spectral::eigen::{subsets_by_size, symmetrized};
use crate::spectral::{
    build_chain, commute_time_linear, commute_time_simple, compare_spectra, compound_spectrum,
    detailed_balance_residual, eigenvalues_simple, left_eigen_residual, numeric_eigenvalues, phi, psi,
    stationary_closed_form, stationary_residual, stationary_solve, Restrict, TransitionMatrix,
};

/// Double-mode tolerance for direct identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Tolerance for dense eigensolve comparisons and commute-time agreement.
pub const EIGENSOLVE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    fn exact<S: Scalar>(&mut self, name: &str, residual: S, tol: f64) {
        // exact mode demands zero; double mode uses the tolerance
        let passed = if S::EXACT { residual.is_zero() } else { residual.to_f64() <= tol };
        self.checks.push(Check { name: name.into(), passed, residual: residual.to_f64(), tolerance: if S::EXACT { 0.0 } else { tol } });
    }

    fn approx(&mut self, name: &str, residual: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), passed: residual <= tol, residual, tolerance: tol });
    }
}

fn max<S: Scalar>(a: S, b: S) -> S {
    if b > a { b } else { a }
}

/// Builds the simple-process chain and runs [`verify_simple_with_chain`].
pub fn verify_simple<S: Scalar>(host: &HostGraph, p: &[S]) -> Result<VerifyReport> {
    let dist = simple_edit_weights(host, p)?;
    let chain = build_chain(&dist, Restrict::All, 1 << 20)?;
    verify_simple_with_chain(&chain, p)
}

/// Checks a given matrix against every closed form of the simple process
/// with edge probabilities `p`.
pub fn verify_simple_with_chain<S: Scalar>(chain: &TransitionMatrix<S>, p: &[S]) -> Result<VerifyReport> {
    let m = p.len();
    let mut report = VerifyReport::default();
    report.exact("row_stochastic", chain.stochasticity_residual(), IDENTITY_TOL);

    let pi = stationary_closed_form(p)?;
    report.exact("stationary", stationary_residual(&pi, chain)?, IDENTITY_TOL);
    report.exact("detailed_balance", detailed_balance_residual(&pi, chain)?, IDENTITY_TOL);

    let mut worst = S::zero();
    for t in subsets_by_size(m) {
        let set = EdgeSet::from_mask(m, t)?;
        let lambda = S::from_ratio(t.count_ones() as i64, m as i64);
        worst = max(worst, left_eigen_residual(&phi(&set, p)?, chain, &lambda)?);
    }
    report.exact("eigenvectors", worst, IDENTITY_TOL);

    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let pif: Vec<f64> = pi.iter().map(Scalar::to_f64).collect();
    let chain_f = chain.to_f64();
    if S::EXACT {
        report.exact("symmetrized_symmetric", squared_asymmetry(chain, &pi), IDENTITY_TOL);
        report.exact("orthonormality", weighted_gram_residual(p, &pi)?, IDENTITY_TOL);
    } else {
        let q = symmetrized(&chain_f, &pif)?;
        report.approx("symmetrized_symmetric", (&q - q.transpose()).amax(), IDENTITY_TOL);
        let psis: Vec<Vec<f64>> = subsets_by_size(m)
            .into_iter()
            .map(|t| psi(&EdgeSet::from_mask(m, t).expect("subset"), &pf))
            .collect::<Result<_>>()?;
        let mut gram = 0.0f64;
        for (i, a) in psis.iter().enumerate() {
            for (j, b) in psis.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                gram = gram.max((dot - target).abs());
            }
        }
        report.approx("orthonormality", gram, IDENTITY_TOL);
    }

    let expected = eigenvalues_simple::<S>(m)?;
    if S::EXACT && chain.len() <= EXACT_RANK_STATES {
        report.exact("spectrum", S::from_usize(nullity_mismatch(chain, &expected.grouped())), IDENTITY_TOL);
    } else {
        let numeric = match numeric_eigenvalues(&chain_f, Some(&pif)) {
            Ok(v) => v,
            Err(_) => numeric_eigenvalues(&chain_f, None)?,
        };
        report.approx("spectrum", compare_spectra(&expected.multiset_f64(), &numeric, EIGENSOLVE_TOL).max_deviation, EIGENSOLVE_TOL);
    }

    let n = chain.len();
    let mut rng = rng_for(0, 0);
    let pairs: Vec<(usize, usize)> = if n <= 8 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        use rand::Rng;
        (0..16).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
    };
    if S::EXACT && n <= 16 {
        let mut worst = S::zero();
        for &(a, b) in &pairs {
            let closed = commute_time_simple(chain.states()[a], chain.states()[b], p)?;
            worst = max(worst, (closed - commute_time_linear(chain, a, b)?).abs());
        }
        report.exact("commute_times", worst, EIGENSOLVE_TOL);
    } else {
        let mut worst = 0.0f64;
        for &(a, b) in &pairs {
            let closed = commute_time_simple(chain_f.states()[a], chain_f.states()[b], &pf)?;
            let linear = commute_time_linear(&chain_f, a, b)?;
            worst = worst.max((closed - linear).abs() / closed.abs().max(1.0));
        }
        report.approx("commute_times", worst, EIGENSOLVE_TOL);
    }
    Ok(report)
}

/// Checks a compound process on its recurrent class: lattice spectrum
/// against a dense eigensolve, and the chamber count.
pub fn verify_compound<S: Scalar>(dist: &WeightedEdits<S>, cap: usize) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let (_lattice, class, spectrum) = compound_spectrum(dist, cap)?;
    let chain = build_chain(dist, Restrict::Recurrent, cap)?;
    report.exact("row_stochastic", chain.stochasticity_residual(), IDENTITY_TOL);
    let dimension_gap = spectrum.total_dimension().abs_diff(class.states.len() as u64);
    report.approx("multiplicity_sum", dimension_gap as f64, 0.0);

    let pi = stationary_solve(&chain)?;
    report.exact("stationary", stationary_residual(&pi, &chain)?, IDENTITY_TOL);

    if S::EXACT && chain.len() <= EXACT_RANK_STATES {
        report.exact("spectrum", S::from_usize(nullity_mismatch(&chain, &spectrum.grouped())), IDENTITY_TOL);
    } else {
        let numeric = numeric_eigenvalues(&chain.to_f64(), None)?;
        report.approx(
            "spectrum",
            compare_spectra(&spectrum.multiset_f64(), &numeric, EIGENSOLVE_TOL).max_deviation,
            EIGENSOLVE_TOL,
        );
    }
    Ok(report)
}

/// `max |π_i P_ij² / π_j - π_j P_ji² / π_i|`: the squared entries of
/// `Π^{1/2} P Π^{-1/2}` and its transpose, without square roots.
fn squared_asymmetry<S: Scalar>(chain: &TransitionMatrix<S>, pi: &[S]) -> S {
    let mut worst = S::zero();
    for (i, j, w) in chain.transitions() {
        let back = chain.entry(j, i);
        let a = pi[i].clone() * w.clone() * w.clone() / pi[j].clone();
        let b = pi[j].clone() * back.clone() * back / pi[i].clone();
        worst = max(worst, (a - b).abs());
    }
    worst
}

/// Orthonormality of `ψ_T = φ_T c_T / √π` with `c_T² = ∏_{e∉T} p_e(1-p_e)`,
/// checked on squares so it stays rational: `c_T² Σ φ_T²/π = 1` on the
/// diagonal and `Σ φ_S φ_T / π = 0` off it.
fn weighted_gram_residual<S: Scalar>(p: &[S], pi: &[S]) -> Result<S> {
    let m = p.len();
    let subsets = subsets_by_size(m);
    let phis: Vec<Vec<S>> = subsets.iter().map(|&t| phi(&EdgeSet::from_mask(m, t)?, p)).collect::<Result<_>>()?;
    let scale: Vec<S> = subsets
        .iter()
        .map(|&t| {
            (0..m)
                .filter(|&e| t >> e & 1 == 0)
                .fold(S::one(), |acc, e| acc * p[e].clone() * (S::one() - p[e].clone()))
        })
        .collect();
    let mut worst = S::zero();
    for (i, a) in phis.iter().enumerate() {
        for (j, b) in phis.iter().enumerate().skip(i) {
            let dot = a.iter().zip(b).zip(pi).fold(S::zero(), |acc, ((x, y), w)| acc + x.clone() * y.clone() / w.clone());
            let residual = if i == j { scale[i].clone() * dot - S::one() } else { dot };
            worst = max(worst, residual.abs());
        }
    }
    Ok(worst)
}

/// Largest chain checked by exact ranks in rational mode.
const EXACT_RANK_STATES: usize = 256;

/// `Σ_λ |dim ker(P - λI) - mult(λ)| + |n - Σ mult|`. Zero means the claimed
/// eigenvalues have independent eigenvectors filling the space, which pins
/// the spectrum exactly.
fn nullity_mismatch<S: Scalar>(chain: &TransitionMatrix<S>, grouped: &[(S, u64)]) -> usize {
    let n = chain.len();
    let dense = chain.to_dense();
    let mut gap = n.abs_diff(grouped.iter().map(|(_, k)| *k as usize).sum());
    for (lambda, mult) in grouped {
        let mut a = dense.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = row[i].clone() - lambda.clone();
        }
        gap += (n - linalg::rank(a)).abs_diff(*mult as usize);
    }
    gap
}
