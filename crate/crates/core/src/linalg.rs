//! Small dense helpers shared by the transform, objective and experiment code.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

const EIG_MAX_ITER: usize = 10_000;

/// Rows `rows` and columns `cols` of `m`, in the given order.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn subvector(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

/// Rows `rows` of `m`, all columns.
pub fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

pub fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Smallest accepted squared pivot, relative to the largest diagonal entry.
pub const CHOLESKY_PIVOT_TOLERANCE: f64 = 1e-12;

/// Cholesky factor, or `None` when the matrix is not numerically positive
/// definite. Rounding can leave a singular PSD matrix with a tiny positive last
/// pivot, so pivots are checked against the diagonal scale.
pub fn cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let scale = m.diagonal().iter().fold(0.0_f64, |a, &v| a.max(v));
    let chol = Cholesky::new(m.clone())?;
    let min_pivot = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |a, &v| a.min(v * v));
    (min_pivot > CHOLESKY_PIVOT_TOLERANCE * scale).then_some(chol)
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted ascending.
pub fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIG_MAX_ITER).ok_or(Error::EigFailure)?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = select_columns(&eig.eigenvectors, &order);
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues_sorted(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigFailure);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Singular values of `a`, descending. Empty matrices have none.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Smallest of the `min(rows, cols)` singular values; zero for an empty matrix.
pub fn sigma_min(a: &DMatrix<f64>) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Symmetric square root `P^{1/2}` of a symmetric matrix, clipping negative eigenvalues to zero.
/// Returns the root and the number of clipped eigenvalues.
pub fn symmetric_sqrt(p: &DMatrix<f64>) -> Result<(DMatrix<f64>, usize)> {
    let (vals, vecs) = symmetric_eigen_sorted(p)?;
    let mut clipped = 0;
    let roots = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| {
            if v < 0.0 {
                clipped += 1;
                0.0
            } else {
                v.sqrt()
            }
        }),
    );
    let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] * roots[j]);
    Ok((&scaled * vecs.transpose(), clipped))
}

/// Numerical rank by SVD with relative threshold `rel_tol * sigma_max`.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Sum of `values` in index order; callers rely on this being independent of scheduling.
pub fn ordered_sum(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v)
}
