//! Detection of the matrix classes the error bounds are stated for.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::matrix::Matrix;

/// Relative classification tolerance; the absolute tolerance is this times `‖A‖_max`.
pub const DEFAULT_CLASSIFY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatrixClass {
    pub is_symmetric: bool,
    pub is_spsd: bool,
    pub is_dd: bool,
    pub is_strictly_dd: bool,
    pub is_doubly_dd: bool,
}

impl MatrixClass {
    /// Whether the maximal-modulus entry of every Schur complement sits on
    /// the diagonal, so pivot search may be restricted to it.
    pub fn admits_diagonal_pivoting(&self) -> bool {
        self.is_spsd || self.is_dd
    }
}

/// Classifies `a` with the default tolerance `1e-12·‖A‖_max`.
pub fn classify(a: &Matrix) -> Result<MatrixClass> {
    classify_with_tol(a, DEFAULT_CLASSIFY_REL_TOL * a.max_norm())
}

/// Classifies `a` against the absolute tolerance `tol`.
///
/// Row `i` is dominant when `Σ_{j≠i} |a_ij| ≤ |a_ii| + tol` and strictly
/// dominant when `|a_ii| − Σ_{j≠i} |a_ij| > tol`. Semidefiniteness accepts a
/// smallest eigenvalue down to `−n·tol`.
pub fn classify_with_tol(a: &Matrix, tol: f64) -> Result<MatrixClass> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "classification needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Parameter(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let n = a.n_rows();
    let margins = |t: &Matrix| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| t[(i, j)].abs()).sum();
                t[(i, i)].abs() - off
            })
            .collect()
    };
    let rows = margins(a);
    let cols = margins(&a.transpose());
    let is_dd = rows.iter().all(|&d| d >= -tol);
    let is_strictly_dd = rows.iter().all(|&d| d > tol);
    let is_doubly_dd = is_dd && cols.iter().all(|&d| d >= -tol);

    let is_symmetric = (0..n).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= tol));
    let is_spsd = is_symmetric && symmetric_eigenvalues(a)?[0] >= -(n as f64) * tol;

    Ok(MatrixClass {
        is_symmetric,
        is_spsd,
        is_dd,
        is_strictly_dd,
        is_doubly_dd,
    })
}
