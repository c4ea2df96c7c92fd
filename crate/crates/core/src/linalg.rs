//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition threshold above which a matrix is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// 2-norm condition number from the singular values; `inf` for singular input.
pub fn condition(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().min()
}

/// Inverse of a square matrix, rejecting condition estimates above
/// [`SINGULAR_CONDITION`].
pub fn checked_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Argument(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let cond = condition(m);
    if !(cond < SINGULAR_CONDITION) {
        return Err(Error::Singular { condition: cond });
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Singular { condition: cond })
}

pub fn checked_solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let cond = condition(m);
    if !(cond < SINGULAR_CONDITION) {
        return Err(Error::Singular { condition: cond });
    }
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or(Error::Singular { condition: cond })
}

/// Numerical rank with relative tolerance on the singular values.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Orthonormal basis (columns) of the null space of `m`, whose dimension is
/// fixed by the numerical rank.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    let k = n - rank(m, rel_tol).min(n);
    if k == 0 {
        return DMatrix::zeros(n, 0);
    }
    let eig = (m.transpose() * m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let cols: Vec<DVector<f64>> = idx[..k].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

/// Modified Gram-Schmidt on the columns; `None` if they are dependent.
pub fn orthonormalize(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for i in 0..j {
            let proj = q.column(i).dot(&q.column(j));
            let ci = q.column(i).into_owned();
            let mut cj = q.column_mut(j);
            cj.axpy(-proj, &ci, 1.0);
        }
        let norm = q.column(j).norm();
        if norm < 1e-12 * m.column(j).norm().max(f64::MIN_POSITIVE) || norm == 0.0 {
            return None;
        }
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Some(q)
}

/// If every column of `m` is a multiple of a distinct coordinate vector,
/// returns `(row index, multiplier)` per column.
pub fn coordinate_columns(m: &DMatrix<f64>) -> Option<Vec<(usize, f64)>> {
    let mut used = vec![false; m.nrows()];
    let mut out = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let mut hit = None;
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != 0.0 {
                if hit.is_some() {
                    return None;
                }
                hit = Some((i, v));
            }
        }
        let (i, v) = hit?;
        if used[i] {
            return None;
        }
        used[i] = true;
        out.push((i, v));
    }
    Some(out)
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn is_finite_slice(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}
