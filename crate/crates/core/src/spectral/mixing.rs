//! Total variation decay and mixing-time bounds. Logarithms are natural.

use crate::error::{Error, Result};
use crate::lattice::SpectrumReport;
use crate::scalar::Scalar;
use crate::spectral::TransitionMatrix;

/// `½ Σ |μ(x) - ν(x)|`.
pub fn tv_distance<S: Scalar>(mu: &[S], nu: &[S]) -> Result<S> {
    if mu.len() != nu.len() {
        return Err(Error::LengthMismatch(mu.len(), nu.len()));
    }
    let sum = mu.iter().zip(nu).fold(S::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs());
    Ok(sum / S::from_usize(2))
}

/// `tv(P^t(start, ·), π)` for `t = 0..=t_max`.
pub fn tv_decay<S: Scalar>(chain: &TransitionMatrix<S>, start: usize, pi: &[S], t_max: usize) -> Result<Vec<S>> {
    if pi.len() != chain.len() {
        return Err(Error::LengthMismatch(pi.len(), chain.len()));
    }
    if start >= chain.len() {
        return Err(Error::InvalidArgument(format!("start index {start} out of range")));
    }
    let mut dist = vec![S::zero(); chain.len()];
    dist[start] = S::one();
    let mut curve = Vec::with_capacity(t_max + 1);
    curve.push(tv_distance(&dist, pi)?);
    for _ in 0..t_max {
        dist = chain.left_mul(&dist);
        curve.push(tv_distance(&dist, pi)?);
    }
    Ok(curve)
}

/// `2m (1 - 1/m)^t`, valid for `t ≥ 2m ln m`.
pub fn simple_tv_bound(m: usize, t: usize) -> f64 {
    let m = m as f64;
    2.0 * m * (1.0 - 1.0 / m).powi(t as i32)
}

/// `Σ_{X ≠ top} m_X λ_X^t`.
pub fn brown_bound<S: Scalar>(report: &SpectrumReport<S>, t: usize) -> f64 {
    match report.entries.split_last() {
        Some((_, rest)) => rest
            .iter()
            .map(|e| e.multiplicity as f64 * e.eigenvalue.to_f64().powi(t as i32))
            .sum(),
        None => 0.0,
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    Ok(())
}

/// `ceil(m (c + 2 ln m))`.
pub fn mixing_bound_simple(m: usize, c: f64) -> Result<u64> {
    check_c(c)?;
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let m = m as f64;
    Ok((m * (c + 2.0 * m.ln())).ceil() as u64)
}

/// `ceil((m ln 2 + c)/(1 - λ*))`, or `ceil((ln M + c)/(1 - λ*))` when the
/// number of chambers `M` is known.
pub fn mixing_bound_compound(lambda_star: f64, m: usize, c: f64, chambers: Option<u64>) -> Result<u64> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&lambda_star) {
        return Err(Error::InvalidArgument(format!("λ* = {lambda_star} is outside [0, 1]")));
    }
    if lambda_star >= 1.0 {
        return Err(Error::DegenerateGap);
    }
    let numerator = match chambers {
        Some(count) => (count.max(1) as f64).ln() + c,
        None => m as f64 * std::f64::consts::LN_2 + c,
    };
    Ok((numerator / (1.0 - lambda_star)).ceil() as u64)
}

/// Moran process: `(m² ln 2 + c m)/δ` with `δ` the minimum degree.
pub fn moran_mixing_bound(m: usize, min_degree: usize, c: f64) -> Result<f64> {
    check_c(c)?;
    if min_degree == 0 {
        return Err(Error::DegenerateGap);
    }
    let m = m as f64;
    Ok((m * m * std::f64::consts::LN_2 + c * m) / min_degree as f64)
}

/// Moran process on `K_n`: `(n² ln n + c n)/2`.
pub fn moran_complete_mixing_bound(n: usize, c: f64) -> Result<f64> {
    check_c(c)?;
    let n = n as f64;
    Ok((n * n * n.ln() + c * n) / 2.0)
}

/// Intersection model: `N n² ln 2 + c n`.
pub fn intersection_mixing_bound(ground: usize, attributes: usize, c: f64) -> Result<f64> {
    check_c(c)?;
    let n = ground as f64;
    Ok(attributes as f64 * n * n * std::f64::consts::LN_2 + c * n)
}
