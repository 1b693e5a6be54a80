//! Right-hand sides of the a-priori error bounds for cross approximation
//! and per-matrix reports comparing them with the achieved error.
//!
//! The growth factor `ρ_m` is a supremum over all matrices and cannot be
//! computed. Every check substitutes a proven upper bound for it: Wilkinson's
//! bound in general, 1 for SPSD input and 2 for diagonally dominant input.
//! Each asserted inequality is then implied by the bound it checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, MatrixClass};
use crate::cross::{cross_approximate, skeleton_error, CrossResult, PivotStrategy};
use crate::error::{Error, Result};
use crate::linalg::{inf_to_one_norm, inverse, singular_values, INF_TO_ONE_MAX_COLS};
use crate::matrix::{IndexSet, Matrix};
use crate::maxvol::brute_force_maxvol;

/// `σ_k` counts toward the numerical rank when it exceeds this times `σ_1`.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Slack allowed on a bound ratio before it counts as violated.
pub const RATIO_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `(m+1) σ_{m+1}`, for a maximum-volume skeleton.
    Goreinov,
    /// `4^m ρ_m σ_{m+1}`
    General,
    /// `2^{2m+1} ρ_m γ_m`
    Mixed,
    /// `4^m σ_{m+1}`
    Spsd,
    /// `(m+1) 2^{m+1} σ_{m+1}`
    Dd,
    /// `2 (m+1)² σ_{m+1}`
    DoublyDd,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::Goreinov,
        BoundKind::General,
        BoundKind::Mixed,
        BoundKind::Spsd,
        BoundKind::Dd,
        BoundKind::DoublyDd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Goreinov => "goreinov",
            BoundKind::General => "general",
            BoundKind::Mixed => "mixed",
            BoundKind::Spsd => "spsd",
            BoundKind::Dd => "dd",
            BoundKind::DoublyDd => "doubly_dd",
        }
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown bound kind `{s}`")))
    }
}

/// Wilkinson's bound on the complete-pivoting growth factor after `k` steps,
/// `√(k+1) · √(2 · 3^{1/2} · 4^{1/3} ⋯ (k+1)^{1/k})`. Returns 1 for `k = 0`.
pub fn wilkinson_bound(k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let log_prod: f64 = (2..=k + 1).map(|j| (j as f64).ln() / (j - 1) as f64).sum();
    ((k + 1) as f64).sqrt() * (0.5 * log_prod).exp()
}

/// Closed-form majorant `2 √(k+1) (k+1)^{ln(k+1)/4}` of [`wilkinson_bound`].
pub fn wilkinson_majorant(k: usize) -> f64 {
    let kp = (k + 1) as f64;
    2.0 * kp.sqrt() * kp.powf(kp.ln() / 4.0)
}

/// Right-hand side of the bound `kind` after `m` steps. Parameters a kind
/// does not use are ignored.
pub fn rhs_bound(kind: BoundKind, m: usize, sigma_next: f64, rho: f64, gamma: f64) -> f64 {
    let mf = m as f64;
    let pow2 = |e: usize| 2f64.powi(e as i32);
    match kind {
        BoundKind::Goreinov => (mf + 1.0) * sigma_next,
        BoundKind::General => pow2(2 * m) * rho * sigma_next,
        BoundKind::Mixed => pow2(2 * m + 1) * rho * gamma,
        BoundKind::Spsd => pow2(2 * m) * sigma_next,
        BoundKind::Dd => (mf + 1.0) * pow2(m + 1) * sigma_next,
        BoundKind::DoublyDd => 2.0 * (mf + 1.0).powi(2) * sigma_next,
    }
}

/// Bracket on the approximation number `γ_k(A)`, the smallest `‖E‖_max`
/// with `rank(A + E) ≤ k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBracket {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    /// Exact value, available only for `k = n − 1` on invertible input.
    pub exact: Option<f64>,
}

/// `σ_{k+1}/n ≤ γ_k ≤ σ_{k+1}`, plus the exact value when `k = n − 1`
/// and the ∞→1 enumeration is affordable.
pub fn gamma_bracket(a: &Matrix, k: usize) -> Result<GammaBracket> {
    if !a.is_square() {
        return Err(Error::dim("approximation numbers need a square matrix"));
    }
    let n = a.n_rows();
    if k >= n {
        return Err(Error::dim(format!("k must be below n = {n}, got {k}")));
    }
    let sigma = singular_values(a)[k];
    let exact = if k + 1 == n && n <= INF_TO_ONE_MAX_COLS && sigma > 0.0 {
        gamma_last(a).ok()
    } else {
        None
    };
    Ok(GammaBracket {
        k,
        lower: sigma / n as f64,
        upper: sigma,
        exact,
    })
}

/// `γ_{n−1}(A) = 1 / ‖A⁻¹‖_{∞→1}`, the max-norm distance to singularity.
pub fn gamma_last(a: &Matrix) -> Result<f64> {
    let inv = inverse(a)?;
    Ok(1.0 / inf_to_one_norm(&inv)?)
}

/// One inequality `min_k |p_k| ≤ F · σ_{m+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotBoundCheck {
    pub class: String,
    pub factor: f64,
    pub rhs: f64,
    /// `rhs − min_pivot`; nonnegative when the inequality holds.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinPivotReport {
    pub m: usize,
    pub min_pivot: f64,
    pub sigma_next: f64,
    pub checks: Vec<PivotBoundCheck>,
}

impl MinPivotReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Checks `min{|p_1|,…,|p_{m+1}|} ≤ F · σ_{m+1}(A)` with `F = 4^m` for any
/// matrix, `(m+1) 2^m` for DD input and `(m+1)²` for doubly DD input.
pub fn min_pivot_check(
    a: &Matrix,
    result: &CrossResult,
    class: &MatrixClass,
) -> Result<MinPivotReport> {
    let m = result.steps_completed;
    if result.lookahead.is_none() {
        return Err(Error::Precondition(format!(
            "need {} pivots (m steps plus lookahead), got {m}",
            m + 1
        )));
    }
    let min_pivot = result
        .pivot_values_with_lookahead()
        .iter()
        .map(|p| p.abs())
        .fold(f64::INFINITY, f64::min);
    let sigma_next = singular_values(a)[m];
    let tol = RATIO_SLACK * a.max_norm();
    let mf = m as f64;
    let mut factors = vec![("general", 4f64.powi(m as i32))];
    if class.is_dd {
        factors.push(("dd", (mf + 1.0) * 2f64.powi(m as i32)));
    }
    if class.is_doubly_dd {
        factors.push(("doubly_dd", (mf + 1.0).powi(2)));
    }
    let checks = factors
        .into_iter()
        .map(|(name, factor)| {
            let rhs = factor * sigma_next;
            PivotBoundCheck {
                class: name.to_string(),
                factor,
                rhs,
                slack: rhs - min_pivot,
                holds: min_pivot <= rhs + tol,
            }
        })
        .collect();
    Ok(MinPivotReport {
        m,
        min_pivot,
        sigma_next,
        checks,
    })
}

/// Numerical rank: number of `σ_k > 1e-10 · σ_1`.
pub fn numerical_rank(sv: &[f64]) -> usize {
    let cut = RANK_REL_TOL * sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > cut).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub m: usize,
    pub matrix_class: MatrixClass,
    pub pivots: Vec<f64>,
    /// `‖A − A(:,J) A(I,J)⁻¹ A(I,:)‖_max` for the cross approximation.
    pub achieved_error: f64,
    /// Same quantity for an exact maximum-volume skeleton, when affordable.
    pub maxvol_error: Option<f64>,
    pub sigma_next: f64,
    pub min_pivot: f64,
    pub rho_proxy: f64,
    pub gamma: GammaBracket,
    pub bounds: BTreeMap<BoundKind, f64>,
    pub ratios: BTreeMap<BoundKind, f64>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.ratios.values().all(|&r| r <= 1.0 + RATIO_SLACK)
    }
}

/// Runs cross approximation for `m` steps and compares the achieved error
/// with every bound whose class precondition `a` meets.
///
/// Quantities below the numerical-rank threshold `1e-10·σ_1` are treated as
/// exact zeros, and a zero error against a zero bound gives ratio 0.
pub fn bound_report(a: &Matrix, m: usize) -> Result<BoundReport> {
    if !a.is_square() {
        return Err(Error::dim("bound reports need a square matrix"));
    }
    let n = a.n_rows();
    if m >= n {
        return Err(Error::dim(format!("m must be below n = {n}, got {m}")));
    }
    let sv = singular_values(a);
    let rank = numerical_rank(&sv);
    if m > rank {
        return Err(Error::Rank { requested: m, rank });
    }
    let class = classify(a)?;
    let result = cross_approximate(a, m, PivotStrategy::Full)?;
    let zero_cut = RANK_REL_TOL * sv[0];
    let flush = |v: f64| if v <= zero_cut { 0.0 } else { v };

    let achieved = flush(skeleton_error(a, &result)?);
    let sigma_next = flush(sv[m]);
    let gamma = gamma_bracket(a, m)?;
    let gamma_value = flush(gamma.exact.unwrap_or(gamma.upper));
    let rho = wilkinson_bound(m);

    let maxvol_error = if m == 0 {
        Some(a.max_norm())
    } else {
        match brute_force_maxvol(a, m, false) {
            Ok(best) if best.volume > 0.0 => {
                let rows = IndexSet::new(best.row_set)?;
                let cols = IndexSet::new(best.col_set)?;
                Some(flush(maxvol_skeleton_error(a, &rows, &cols)?))
            }
            Ok(_) | Err(Error::Capability(_)) => None,
            Err(e) => return Err(e),
        }
    };

    let mut bounds = BTreeMap::new();
    bounds.insert(
        BoundKind::General,
        rhs_bound(BoundKind::General, m, sigma_next, rho, 0.0),
    );
    bounds.insert(
        BoundKind::Mixed,
        rhs_bound(BoundKind::Mixed, m, 0.0, rho, gamma_value),
    );
    if class.is_spsd {
        bounds.insert(
            BoundKind::Spsd,
            rhs_bound(BoundKind::Spsd, m, sigma_next, 1.0, 0.0),
        );
    }
    if class.is_dd {
        bounds.insert(
            BoundKind::Dd,
            rhs_bound(BoundKind::Dd, m, sigma_next, 2.0, 0.0),
        );
    }
    if class.is_doubly_dd {
        bounds.insert(
            BoundKind::DoublyDd,
            rhs_bound(BoundKind::DoublyDd, m, sigma_next, 2.0, 0.0),
        );
    }
    if maxvol_error.is_some() {
        bounds.insert(
            BoundKind::Goreinov,
            rhs_bound(BoundKind::Goreinov, m, sigma_next, 1.0, 0.0),
        );
    }

    let ratio = |err: f64, rhs: f64| {
        if err == 0.0 {
            0.0
        } else {
            err / rhs
        }
    };
    let ratios = bounds
        .iter()
        .map(|(&kind, &rhs)| {
            let err = match kind {
                BoundKind::Goreinov => maxvol_error.unwrap_or(0.0),
                _ => achieved,
            };
            (kind, ratio(err, rhs))
        })
        .collect();

    let pivots = result.pivot_values_with_lookahead();
    let min_pivot = pivots.iter().map(|p| p.abs()).fold(f64::INFINITY, f64::min);
    Ok(BoundReport {
        n,
        m,
        matrix_class: class,
        pivots,
        achieved_error: achieved,
        maxvol_error,
        sigma_next,
        min_pivot,
        rho_proxy: rho,
        gamma,
        bounds,
        ratios,
    })
}

/// Skeleton error for arbitrary index sets, `‖A − A(:,J) A(I,J)⁻¹ A(I,:)‖_max`.
pub fn maxvol_skeleton_error(a: &Matrix, rows: &IndexSet, cols: &IndexSet) -> Result<f64> {
    let lu = crate::linalg::Lu::factor(&a.select(rows.as_slice(), cols.as_slice())?)?;
    let coeff = lu.solve(&a.select_rows(rows.as_slice())?)?;
    let skel = a.select_cols(cols.as_slice())?.matmul(&coeff)?;
    Ok(a.sub(&skel)?.max_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilkinson_values() {
        assert!((wilkinson_bound(1) - 2.0).abs() < 1e-15);
        let k2 = 3f64.sqrt() * (2.0 * 3f64.sqrt()).sqrt();
        assert!((wilkinson_bound(2) - k2).abs() < 1e-14);
        assert!((wilkinson_bound(2) - 3.224).abs() < 1e-3);
        assert_eq!(wilkinson_bound(0), 1.0);
        for k in 1..=50 {
            assert!(wilkinson_bound(k + 1) > wilkinson_bound(k));
            assert!(wilkinson_bound(k) <= wilkinson_majorant(k));
        }
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs_bound(BoundKind::General, 1, 0.5, 2.0, 0.0), 4.0);
        assert_eq!(rhs_bound(BoundKind::Spsd, 2, 1.0, 7.0, 0.0), 16.0);
        assert_eq!(rhs_bound(BoundKind::DoublyDd, 3, 1.0, 0.0, 0.0), 32.0);
        assert_eq!(rhs_bound(BoundKind::Dd, 2, 1.0, 0.0, 0.0), 24.0);
        assert_eq!(rhs_bound(BoundKind::Mixed, 1, 0.0, 1.0, 0.25), 2.0);
        assert_eq!(rhs_bound(BoundKind::Goreinov, 3, 0.5, 0.0, 0.0), 2.0);
        assert!("bogus".parse::<BoundKind>().is_err());
        assert_eq!(
            "doubly_dd".parse::<BoundKind>().unwrap(),
            BoundKind::DoublyDd
        );
    }

    #[test]
    fn gamma_last_identity() {
        assert!((gamma_last(&Matrix::identity(2)).unwrap() - 0.5).abs() < 1e-15);
        // I + E with E = ½[[-1,1],[1,-1]] is singular and ‖E‖_max = ½.
        let e = Matrix::from_rows(&[vec![-0.5, 0.5], vec![0.5, -0.5]]).unwrap();
        let pert = Matrix::identity(2).sub(&e.scale(-1.0)).unwrap();
        assert_eq!(crate::linalg::determinant(&pert).unwrap(), 0.0);
    }

    #[test]
    fn gamma_last_chain_and_scaling() {
        let eps = 1e-3;
        let g = gamma_last(&Matrix::diag(&[1.0, eps])).unwrap();
        assert!(g <= eps * (1.0 + 1e-12) && g >= eps / 2.0);
        let a = Matrix::from_rows(&[
            vec![3.0, 1.0, 0.0],
            vec![-1.0, 2.0, 0.5],
            vec![0.0, 1.0, 4.0],
        ])
        .unwrap();
        let g = gamma_last(&a).unwrap();
        let g3 = gamma_last(&a.scale(-3.0)).unwrap();
        assert!((g3 - 3.0 * g).abs() <= 1e-13 * g3);
        let b = gamma_bracket(&a, 2).unwrap();
        assert!(b.lower <= g && g <= b.upper);
        assert_eq!(b.exact, Some(g));
    }

    #[test]
    fn gamma_last_singular() {
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(gamma_last(&s), Err(Error::Numerical { .. })));
    }

    #[test]
    fn min_pivot_identity() {
        let a = Matrix::identity(4);
        let res = cross_approximate(&a, 2, PivotStrategy::Full).unwrap();
        let rep = min_pivot_check(&a, &res, &classify(&a).unwrap()).unwrap();
        assert_eq!(rep.min_pivot, 1.0);
        assert!((rep.sigma_next - 1.0).abs() < 1e-14);
        assert_eq!(rep.checks.len(), 3);
        assert!(rep.all_hold());
    }

    #[test]
    fn min_pivot_needs_lookahead() {
        let a = Matrix::from_fn(3, 3, |_, _| 1.0);
        let res = cross_approximate(&a, 2, PivotStrategy::Full).unwrap();
        assert!(matches!(
            min_pivot_check(&a, &res, &classify(&a).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bound_report_rank_two() {
        let u = [1.0, 2.0, -1.0, 0.5, 3.0];
        let v = [0.5, -1.0, 2.0, 1.0, 1.0];
        let a = Matrix::from_fn(5, 5, |i, j| u[i] * v[j] + 0.1 * (i * j) as f64);
        let rep = bound_report(&a, 2).unwrap();
        assert_eq!(rep.achieved_error, 0.0);
        assert!(rep.ratios.values().all(|&r| r == 0.0));
        assert!(matches!(
            bound_report(&a, 3),
            Err(Error::Rank {
                requested: 3,
                rank: 2
            })
        ));
        assert!(bound_report(&a, 5).is_err());
    }
}
