//! Small dense helpers shared by the solvers.

use faer::linalg::solvers::Llt;
use faer::{Mat, Side};

use crate::error::{HohlError, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Cholesky factor of a symmetric matrix. If the plain factorization fails,
/// retries once with `ridge` added to the diagonal. Returns the factor and the
/// shift actually used.
pub fn cholesky_with_ridge(a: &Mat<f64>, ridge: f64) -> Result<(Llt<f64>, f64)> {
    if let Ok(f) = a.llt(Side::Lower) {
        return Ok((f, 0.0));
    }
    let mut shifted = a.clone();
    for i in 0..shifted.nrows() {
        shifted[(i, i)] += ridge;
    }
    shifted
        .llt(Side::Lower)
        .map(|f| (f, ridge))
        .map_err(|_| HohlError::NotPositiveDefinite { ridge })
}

/// Principal submatrix `a[idx, idx]`.
pub fn submatrix(a: &Mat<f64>, rows: &[usize], cols: &[usize]) -> Mat<f64> {
    Mat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}
