//! Dense Gaussian elimination over any [`Scalar`].

use crate::scalar::Scalar;

/// Solves `a x = b` for square `a` (row-major). Returns `None` when `a` is
/// singular. Pivots on the largest magnitude in each column.
pub fn solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side length");
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("comparable")
        })?;
        if a[pivot][col].is_negligible() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = S::one() / a[col][col].clone();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() * inv.clone();
            for k in col..n {
                let delta = factor.clone() * a[col][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

/// Rank of a dense matrix; entries below the negligibility threshold count
/// as zero, so the result is exact for rationals.
pub fn rank<S: Scalar>(mut a: Vec<Vec<S>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("comparable"))
            .expect("nonempty range");
        if a[pivot][col].is_negligible() {
            continue;
        }
        a.swap(rank, pivot);
        let inv = S::one() / a[rank][col].clone();
        for row in rank + 1..rows {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() * inv.clone();
            for k in col..cols {
                let delta = factor.clone() * a[rank][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
        }
        rank += 1;
    }
    rank
}
