//! Exact dense linear algebra on small square matrices stored row-major as
//! `Vec<Vec<S>>`.


use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Dense<S> = Vec<Vec<S>>;

fn check_square<S>(a: &[Vec<S>]) -> Result<usize> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch(format!("expected a square {n}x{n} matrix")));
    }
    Ok(n)
}

/// Determinant by fraction-aware Gaussian elimination with pivot search.
pub fn det<S: Scalar>(a: &[Vec<S>]) -> Result<S> {
    let n = check_square(a)?;
    let mut m = a.to_vec();
    let mut acc = S::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Ok(S::zero());
        };
        if p != col {
            m.swap(p, col);
            acc = -acc;
        }
        let pivot = m[col][col].clone();
        acc *= pivot.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = m[col][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
    }
    Ok(acc)
}

/// Gauss-Jordan inverse; `SingularConstantTerm` if the matrix is singular.
pub fn inverse<S: Scalar>(a: &[Vec<S>]) -> Result<Dense<S>> {
    let n = check_square(a)?;
    let mut m = a.to_vec();
    let mut inv: Dense<S> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::SingularConstantTerm)?;
        m.swap(p, col);
        inv.swap(p, col);
        let pivot = S::one() / m[col][col].clone();
        for c in 0..n {
            m[col][c] = m[col][c].clone() * pivot.clone();
            inv[col][c] = inv[col][c].clone() * pivot.clone();
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..n {
                let v = m[col][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - v;
                let w = inv[col][c].clone() * f.clone();
                inv[r][c] = inv[r][c].clone() - w;
            }
        }
    }
    Ok(inv)
}

/// The submatrix with the listed rows and columns removed.
pub fn delete<S: Clone>(a: &[Vec<S>], rows: &[usize], cols: &[usize]) -> Dense<S> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| !rows.contains(i))
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| !cols.contains(j))
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Dense<S> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![S::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] = out[i][j].clone() + a[i][l].clone() * b[l][j].clone();
                }
            }
        }
    }
    out
}

/// Sylvester's criterion on a symmetric matrix.
pub fn is_positive_definite<S: Scalar>(a: &[Vec<S>]) -> bool {
    let n = a.len();
    (1..=n).all(|k| {
        let lead: Dense<S> = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        det(&lead).is_ok_and(|d| d.is_positive())
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetIdentity<S> {
    pub lhs: S,
    pub rhs: S,
    pub holds: bool,
}

/// For `n ≥ 3`, compares
/// `det A(n̂;n̂) det A(n-1̂;n-1̂) - det A(n-1̂;n̂) det A(n̂;n-1̂)` with
/// `det B det A`, where `A(r̂;ĉ)` deletes row `r` and column `c` and `B`
/// deletes the last two rows and columns.
pub fn minor_det_identity_check<S: Scalar>(a: &[Vec<S>]) -> Result<DetIdentity<S>> {
    let n = check_square(a)?;
    if n < 3 {
        return Err(Error::ShapeMismatch(format!("need n >= 3, got {n}")));
    }
    let (last, prev) = (n - 1, n - 2);
    let d = |r: &[usize], c: &[usize]| det(&delete(a, r, c));
    let lhs = d(&[last], &[last])? * d(&[prev], &[prev])? - d(&[prev], &[last])? * d(&[last], &[prev])?;
    let rhs = d(&[prev, last], &[prev, last])? * det(a)?;
    Ok(DetIdentity {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}
