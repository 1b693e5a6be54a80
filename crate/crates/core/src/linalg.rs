//! Dense kernels: LU with partial pivoting, determinants, inverses,
//! singular values and the exhaustive ∞→1 operator norm.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Column cap for [`inf_to_one_norm`]; `2^(n-1)` sign vectors are visited.
pub const INF_TO_ONE_MAX_COLS: usize = 25;

/// `PA = LU` with row partial pivoting, packed in one matrix
/// (unit lower factor below the diagonal).
#[derive(Debug, Clone)]
pub struct Lu {
    packed: Matrix,
    perm: Vec<usize>,
    sign: f64,
    /// First elimination step that met an exactly zero pivot column.
    singular_at: Option<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::dim(format!(
                "LU needs a square matrix, got {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let n = a.n_rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular_at = None;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pmax == 0.0 {
                singular_at.get_or_insert(k);
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= l * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Lu {
            packed: lu,
            perm,
            sign,
            singular_at,
        })
    }

    pub fn det(&self) -> f64 {
        if self.singular_at.is_some() {
            return 0.0;
        }
        let n = self.packed.n_rows();
        (0..n).fold(self.sign, |d, k| d * self.packed[(k, k)])
    }

    pub fn singular_at(&self) -> Option<usize> {
        self.singular_at
    }

    /// Solves `A X = B` for a block of right-hand sides.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if let Some(k) = self.singular_at {
            return Err(Error::numerical(k, "matrix is singular"));
        }
        let n = self.packed.n_rows();
        if b.n_rows() != n {
            return Err(Error::dim("right-hand side has wrong number of rows"));
        }
        let mut x = Matrix::from_fn(n, b.n_cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.n_cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.packed[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.packed[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.packed[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Determinant through LU with partial pivoting.
pub fn determinant(a: &Matrix) -> Result<f64> {
    Ok(Lu::factor(a)?.det())
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve(&Matrix::identity(a.n_rows()))
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let mut sv: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Spectral norm `‖A‖₂ = σ₁(A)`.
pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a)[0]
}

/// Eigenvalues of the symmetric part `(A + Aᵀ)/2`, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::dim("eigenvalues need a square matrix"));
    }
    let m = a.to_nalgebra();
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `‖B‖_{∞→1} = max_{x ∈ {±1}ⁿ} ‖Bx‖₁`, by exhaustive enumeration.
pub fn inf_to_one_norm(b: &Matrix) -> Result<f64> {
    inf_to_one_norm_capped(b, INF_TO_ONE_MAX_COLS)
}

pub fn inf_to_one_norm_capped(b: &Matrix, max_cols: usize) -> Result<f64> {
    let n = b.n_cols();
    if n > max_cols {
        return Err(Error::Capability(format!(
            "∞→1 norm enumerates 2^{n} sign vectors; column cap is {max_cols}"
        )));
    }
    // x and -x give the same value, so the last sign stays +1.
    let free = n - 1;
    let top = free.min(8);
    let low = free - top;
    let cols: Vec<Vec<f64>> = (0..n).map(|j| b.col(j)).collect();

    let best = (0..1usize << top)
        .into_par_iter()
        .map(|chunk| {
            let mut signs = vec![1.0; n];
            for t in 0..top {
                if chunk >> t & 1 == 1 {
                    signs[low + t] = -1.0;
                }
            }
            let mut y = apply_signs(&cols, &signs, b.n_rows());
            let mut best = one_norm(&y);
            for step in 1..1usize << low {
                let bit = step.trailing_zeros() as usize;
                signs[bit] = -signs[bit];
                if step % 4096 == 0 {
                    y = apply_signs(&cols, &signs, b.n_rows());
                } else {
                    let s = 2.0 * signs[bit];
                    for (yi, ci) in y.iter_mut().zip(&cols[bit]) {
                        *yi += s * ci;
                    }
                }
                best = best.max(one_norm(&y));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

fn apply_signs(cols: &[Vec<f64>], signs: &[f64], rows: usize) -> Vec<f64> {
    let mut y = vec![0.0; rows];
    for (c, s) in cols.iter().zip(signs) {
        for (yi, ci) in y.iter_mut().zip(c) {
            *yi += s * ci;
        }
    }
    y
}

fn one_norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Plain enumeration over all 2ⁿ sign vectors.
    fn inf_to_one_naive(b: &Matrix) -> f64 {
        let n = b.n_cols();
        (0..1usize << n)
            .map(|mask| {
                (0..b.n_rows())
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                if mask >> j & 1 == 1 {
                                    -b[(i, j)]
                                } else {
                                    b[(i, j)]
                                }
                            })
                            .sum::<f64>()
                            .abs()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn inf_to_one_examples() {
        assert_eq!(inf_to_one_norm(&Matrix::identity(2)).unwrap(), 2.0);
        assert_eq!(
            inf_to_one_norm(&m(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap(),
            4.0
        );
        assert_eq!(inf_to_one_norm(&m(&[&[-2.5]])).unwrap(), 2.5);
    }

    #[test]
    fn inf_to_one_matches_naive_enumeration() {
        // 12 columns exercises both the chunked and the Gray-code part.
        let b = Matrix::from_fn(5, 12, |i, j| {
            ((i * 7 + j * 13) % 11) as f64 - 5.0 + 0.1 * j as f64
        });
        let fast = inf_to_one_norm(&b).unwrap();
        let slow = inf_to_one_naive(&b);
        assert!((fast - slow).abs() <= 1e-12 * slow, "{fast} vs {slow}");
    }

    #[test]
    fn inf_to_one_cap() {
        let b = Matrix::zeros(1, 4);
        assert!(matches!(
            inf_to_one_norm_capped(&b, 3),
            Err(Error::Capability(_))
        ));
        assert!(matches!(
            inf_to_one_norm(&Matrix::zeros(1, 26)),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn singular_value_examples() {
        let sv = singular_values(&Matrix::diag(&[1.0, 3.0]));
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
        let sv = singular_values(&m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!((sv[0] - 1.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
        let sv = singular_values(&m(&[&[1.0, 1.0], &[1.0, 1.0]]));
        assert!((sv[0] - 2.0).abs() < 1e-14 && sv[1].abs() < 1e-14);
    }

    #[test]
    fn determinant_tracks_sign() {
        assert_eq!(determinant(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap(), -1.0);
        assert_eq!(determinant(&m(&[&[1.0, 2.0], &[2.0, 4.0]])).unwrap(), 0.0);
        let d = determinant(&m(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]])).unwrap();
        assert!((d - 18.0).abs() < 1e-13);
        assert!(determinant(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[4.0, -2.0, 1.0], &[3.0, 6.0, -4.0], &[2.0, 1.0, 8.0]]);
        let inv = inverse(&a).unwrap();
        let prod = a.matmul(&inv).unwrap();
        assert!(prod.sub(&Matrix::identity(3)).unwrap().max_norm() < 1e-14);
        let err = inverse(&m(&[&[1.0, 2.0], &[2.0, 4.0]])).unwrap_err();
        assert!(matches!(err, Error::Numerical { index: 1, .. }));
    }
}
