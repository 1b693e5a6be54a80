//! Submatrix volumes and exhaustive maximum-volume search.
//!
//! The search is exact and exponential. It exists to check, at small sizes,
//! that symmetric positive semidefinite and diagonally dominant matrices
//! always have a principal submatrix of maximum volume.

use std::cmp::Ordering;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{determinant, singular_values};
use crate::matrix::{IndexSet, Matrix};

/// Default cap on the number of `(I, J)` pairs the exhaustive search visits.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Relative slack when comparing a principal maximum against the overall one.
pub const VOLUME_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeResult {
    pub row_set: Vec<usize>,
    pub col_set: Vec<usize>,
    pub volume: f64,
    pub is_principal: bool,
}

impl VolumeResult {
    fn new(rows: &[usize], cols: &[usize], volume: f64) -> Self {
        VolumeResult {
            row_set: rows.to_vec(),
            col_set: cols.to_vec(),
            volume,
            is_principal: rows == cols,
        }
    }
}

/// Outcome of comparing the best principal submatrix with the best overall one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalCheck {
    pub holds: bool,
    pub overall: VolumeResult,
    pub principal: VolumeResult,
}

/// `|det A(I, J)|`.
pub fn volume(a: &Matrix, rows: &IndexSet, cols: &IndexSet) -> Result<f64> {
    if rows.len() != cols.len() {
        return Err(Error::dim(format!(
            "volume needs |I| = |J|, got {} and {}",
            rows.len(),
            cols.len()
        )));
    }
    if rows.is_empty() {
        return Err(Error::dim("volume needs nonempty index sets"));
    }
    rows.check_bound(a.n_rows())?;
    cols.check_bound(a.n_cols())?;
    Ok(determinant(&a.select(rows.as_slice(), cols.as_slice())?)?.abs())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Exact maximizer of `|det A(I, J)|` over `|I| = |J| = k`, or over `I = J`
/// when `principal_only`. Ties go to the lexicographically smallest `(I, J)`.
pub fn brute_force_maxvol(a: &Matrix, k: usize, principal_only: bool) -> Result<VolumeResult> {
    brute_force_maxvol_capped(a, k, principal_only, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_maxvol_capped(
    a: &Matrix,
    k: usize,
    principal_only: bool,
    cap: u128,
) -> Result<VolumeResult> {
    if !a.is_square() {
        return Err(Error::dim("maximum-volume search needs a square matrix"));
    }
    let n = a.n_rows();
    if k == 0 || k > n {
        return Err(Error::dim(format!("k must lie in 1..={n}, got {k}")));
    }
    let subsets = binomial(n, k);
    let work = if principal_only {
        subsets
    } else {
        subsets.saturating_mul(subsets)
    };
    if work > cap {
        return Err(Error::Capability(format!(
            "exhaustive search over {work} index pairs exceeds cap {cap}"
        )));
    }

    let all: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let vol = |r: &[usize], c: &[usize]| -> f64 {
        // Index sets come from combinations, so selection cannot fail.
        determinant(&a.select(r, c).expect("valid selection"))
            .expect("square selection")
            .abs()
    };

    let best = all
        .par_iter()
        .map(|rows| {
            if principal_only {
                return VolumeResult::new(rows, rows, vol(rows, rows));
            }
            let mut best = VolumeResult::new(rows, &all[0], vol(rows, &all[0]));
            for cols in &all[1..] {
                let v = vol(rows, cols);
                if v > best.volume {
                    best = VolumeResult::new(rows, cols, v);
                }
            }
            best
        })
        .reduce_with(|x, y| match x.volume.total_cmp(&y.volume) {
            Ordering::Greater => x,
            Ordering::Less => y,
            Ordering::Equal => {
                if (&x.row_set, &x.col_set) <= (&y.row_set, &y.col_set) {
                    x
                } else {
                    y
                }
            }
        })
        .expect("at least one subset");
    Ok(best)
}

/// Checks whether some principal `k×k` submatrix attains the maximum volume
/// up to [`VOLUME_REL_TOL`], returning both maximizers.
pub fn check_principal_optimality(a: &Matrix, k: usize) -> Result<PrincipalCheck> {
    let overall = brute_force_maxvol(a, k, false)?;
    let principal = brute_force_maxvol(a, k, true)?;
    let holds = principal.volume >= overall.volume - VOLUME_REL_TOL * overall.volume;
    Ok(PrincipalCheck {
        holds,
        overall,
        principal,
    })
}

/// Volume of the column selection `B(:, I)`: the product of its singular
/// values. The empty selection has volume 1, and more columns than rows
/// give volume 0.
pub fn column_volume(b: &Matrix, cols: &IndexSet) -> Result<f64> {
    cols.check_bound(b.n_cols())?;
    if cols.is_empty() {
        return Ok(1.0);
    }
    if cols.len() > b.n_rows() {
        return Ok(0.0);
    }
    Ok(singular_values(&b.select_cols(cols.as_slice())?)
        .iter()
        .product())
}
