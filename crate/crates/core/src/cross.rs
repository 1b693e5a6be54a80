//! Cross approximation with complete pivoting.
//!
//! Each step picks the residual entry of largest modulus, records it as the
//! next pivot and subtracts the rank-one cross through it. After `m` steps
//! the residual is the Schur complement of the pivot block, so the skeleton
//! `A(:,J) A(I,J)⁻¹ A(I,:)` differs from `A` by exactly that residual. The
//! procedure is Gaussian elimination with complete pivoting.

use serde::{Deserialize, Serialize};

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::linalg::{inverse, spectral_norm, Lu};
use crate::matrix::{IndexSet, Matrix};

/// Pivots at or below this fraction of `‖A‖_max` count as breakdown.
pub const DEFAULT_BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotStrategy {
    /// Search the whole residual.
    Full,
    /// Search the diagonal only; valid for SPSD and diagonally dominant input.
    Diagonal,
}

impl std::str::FromStr for PivotStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PivotStrategy::Full),
            "diagonal" => Ok(PivotStrategy::Diagonal),
            other => Err(Error::Usage(format!("unknown pivot strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    RequestedRank,
    Breakdown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossOptions {
    pub breakdown_tol: f64,
}

impl Default for CrossOptions {
    fn default() -> Self {
        CrossOptions {
            breakdown_tol: DEFAULT_BREAKDOWN_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossResult {
    pub strategy: PivotStrategy,
    /// Pivots in selection order.
    pub pivots: Vec<Pivot>,
    /// The pivot one further step would take, `p_{m+1}`. Absent when the
    /// run broke down or no rows/columns are left.
    pub lookahead: Option<Pivot>,
    pub requested: usize,
    pub steps_completed: usize,
    pub termination: Termination,
    /// `‖R_m‖_max`
    pub residual_max: f64,
    /// Final residual `R_m`.
    pub residual: Matrix,
    /// `R_k(:, j_{k+1})` for every step, full length.
    pub(crate) left: Vec<Vec<f64>>,
    /// `R_k(i_{k+1}, :)` for every step, full length.
    pub(crate) right: Vec<Vec<f64>>,
}

impl CrossResult {
    pub fn row_indices(&self) -> Vec<usize> {
        self.pivots.iter().map(|p| p.row).collect()
    }

    pub fn col_indices(&self) -> Vec<usize> {
        self.pivots.iter().map(|p| p.col).collect()
    }

    pub fn row_set(&self) -> IndexSet {
        IndexSet::from_unsorted(self.row_indices()).expect("pivot rows are distinct")
    }

    pub fn col_set(&self) -> IndexSet {
        IndexSet::from_unsorted(self.col_indices()).expect("pivot columns are distinct")
    }

    pub fn pivot_values(&self) -> Vec<f64> {
        self.pivots.iter().map(|p| p.value).collect()
    }

    /// `p_1, …, p_m, p_{m+1}` when the lookahead exists.
    pub fn pivot_values_with_lookahead(&self) -> Vec<f64> {
        let mut v = self.pivot_values();
        v.extend(self.lookahead.map(|p| p.value));
        v
    }

    /// The rank-`m` approximant `Σ_k R_{k-1}(:,j_k) R_{k-1}(i_k,:) / p_k`.
    pub fn approximant(&self) -> Matrix {
        let (rows, cols) = (self.residual.n_rows(), self.residual.n_cols());
        let mut out = Matrix::zeros(rows, cols);
        for ((l, r), p) in self.left.iter().zip(&self.right).zip(&self.pivots) {
            for i in 0..rows {
                for j in 0..cols {
                    out[(i, j)] += l[i] * r[j] / p.value;
                }
            }
        }
        out
    }

    /// Factors of the pivot block `A(I,J) = L₁₁ U₁₁` in pivot order, with
    /// `L₁₁` lower triangular carrying the pivots on its diagonal and `U₁₁`
    /// unit upper triangular. The lookahead pivot, when present, extends
    /// both factors by one.
    pub fn pivot_block_factors(&self) -> (Matrix, Matrix) {
        let mut rows = self.row_indices();
        let mut cols = self.col_indices();
        let mut diag = self.pivot_values();
        if let Some(p) = self.lookahead {
            rows.push(p.row);
            cols.push(p.col);
            diag.push(p.value);
        }
        let k = rows.len();
        assert!(k > 0, "no pivots");
        let mut l11 = Matrix::zeros(k, k);
        let mut u11 = Matrix::zeros(k, k);
        for s in 0..k {
            l11[(s, s)] = diag[s];
            u11[(s, s)] = 1.0;
        }
        for (s, (left, right)) in self.left.iter().zip(&self.right).enumerate() {
            for r in s + 1..k {
                l11[(r, s)] = left[rows[r]];
                u11[(s, r)] = right[cols[r]] / diag[s];
            }
        }
        (l11, u11)
    }
}

pub fn cross_approximate(a: &Matrix, m: usize, strategy: PivotStrategy) -> Result<CrossResult> {
    cross_approximate_with(a, m, strategy, &CrossOptions::default())
}

/// Runs `m` steps of cross approximation with complete (or diagonal)
/// pivoting. Ties go to the smallest `(row, col)` in lexicographic order.
pub fn cross_approximate_with(
    a: &Matrix,
    m: usize,
    strategy: PivotStrategy,
    opts: &CrossOptions,
) -> Result<CrossResult> {
    let (rows, cols) = (a.n_rows(), a.n_cols());
    if m > rows.min(cols) {
        return Err(Error::dim(format!(
            "rank {m} exceeds min dimension of a {rows}x{cols} matrix"
        )));
    }
    if strategy == PivotStrategy::Diagonal {
        if !a.is_square() {
            return Err(Error::Precondition(
                "diagonal pivoting needs a square matrix".into(),
            ));
        }
        if !classify(a)?.admits_diagonal_pivoting() {
            return Err(Error::Precondition(
                "diagonal pivoting needs an SPSD or diagonally dominant matrix".into(),
            ));
        }
    }
    let threshold = opts.breakdown_tol * a.max_norm();
    let mut r = a.clone();
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; cols];
    let mut pivots = Vec::with_capacity(m);
    let mut left = Vec::with_capacity(m);
    let mut right = Vec::with_capacity(m);
    let mut termination = Termination::RequestedRank;

    for _ in 0..m {
        let Some(p) =
            search(&r, strategy, &used_rows, &used_cols).filter(|p| p.value.abs() > threshold)
        else {
            termination = Termination::Breakdown;
            break;
        };
        let col = r.col(p.col);
        let row = r.row(p.row).to_vec();
        schur_update(&mut r, &col, &row, p);
        used_rows[p.row] = true;
        used_cols[p.col] = true;
        pivots.push(p);
        left.push(col);
        right.push(row);
    }

    let lookahead = match termination {
        Termination::RequestedRank => search(&r, strategy, &used_rows, &used_cols),
        Termination::Breakdown => None,
    };

    Ok(CrossResult {
        strategy,
        steps_completed: pivots.len(),
        pivots,
        lookahead,
        requested: m,
        termination,
        residual_max: r.max_norm(),
        residual: r,
        left,
        right,
    })
}

fn search(
    r: &Matrix,
    strategy: PivotStrategy,
    used_rows: &[bool],
    used_cols: &[bool],
) -> Option<Pivot> {
    let mut best: Option<Pivot> = None;
    let mut consider = |i: usize, j: usize| {
        let v = r[(i, j)];
        if best.is_none_or(|b| v.abs() > b.value.abs()) {
            best = Some(Pivot {
                row: i,
                col: j,
                value: v,
            });
        }
    };
    match strategy {
        PivotStrategy::Full => {
            for i in (0..r.n_rows()).filter(|&i| !used_rows[i]) {
                for j in (0..r.n_cols()).filter(|&j| !used_cols[j]) {
                    consider(i, j);
                }
            }
        }
        PivotStrategy::Diagonal => {
            for i in (0..r.n_rows()).filter(|&i| !used_rows[i]) {
                consider(i, i);
            }
        }
    }
    best
}

/// `R ← R − R(:,j) R(i,:) / p`, with the pivot row and column set to zero.
pub(crate) fn schur_update(r: &mut Matrix, col: &[f64], row: &[f64], p: Pivot) {
    for (i, &ci) in col.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        for (j, &rj) in row.iter().enumerate() {
            r[(i, j)] -= ci * rj / p.value;
        }
    }
    for j in 0..r.n_cols() {
        r[(p.row, j)] = 0.0;
    }
    for i in 0..r.n_rows() {
        r[(i, p.col)] = 0.0;
    }
}

/// `‖A − A(:,J) A(I,J)⁻¹ A(I,:)‖_max`, assembled explicitly from `A`.
pub fn skeleton_error(a: &Matrix, result: &CrossResult) -> Result<f64> {
    let skeleton = skeleton(a, result)?;
    Ok(match skeleton {
        Some(s) => a.sub(&s)?.max_norm(),
        None => a.max_norm(),
    })
}

/// The skeleton `A(:,J) A(I,J)⁻¹ A(I,:)`, or `None` when no step was taken.
pub fn skeleton(a: &Matrix, result: &CrossResult) -> Result<Option<Matrix>> {
    if result.steps_completed == 0 {
        return Ok(None);
    }
    let rows = result.row_indices();
    let cols = result.col_indices();
    let lu = Lu::factor(&a.select(&rows, &cols)?)?;
    if let Some(k) = lu.singular_at() {
        return Err(Error::numerical(k, "pivot block A(I,J) is singular"));
    }
    let coeff = lu.solve(&a.select_rows(&rows)?)?;
    Ok(Some(a.select_cols(&cols)?.matmul(&coeff)?))
}

/// Realized pivot growth of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    /// `max_j |p_{j+1}| / |p_1|`; 1 for a single pivot.
    pub growth: f64,
    /// `max_j |p_{last}| / |p_{last-j}|`; 1 for a single pivot.
    pub stepwise: f64,
}

/// Growth ratios of a pivot sequence produced by complete pivoting on `a`.
pub fn realized_growth(pivots: &[f64], a: &Matrix) -> Result<Growth> {
    let Some(&first) = pivots.first() else {
        return Err(Error::Precondition("empty pivot list".into()));
    };
    if let Some(k) = pivots.iter().position(|&p| p == 0.0) {
        return Err(Error::numerical(k, "zero pivot"));
    }
    let norm = a.max_norm();
    if (first.abs() - norm).abs() > 1e-12 * norm {
        return Err(Error::Precondition(format!(
            "first pivot {first} does not equal ‖A‖_max = {norm}"
        )));
    }
    let last = pivots[pivots.len() - 1].abs();
    let growth = pivots[1..]
        .iter()
        .map(|p| p.abs() / first.abs())
        .fold(1.0_f64, f64::max);
    let stepwise = pivots[..pivots.len() - 1]
        .iter()
        .map(|p| last / p.abs())
        .fold(1.0_f64, f64::max);
    Ok(Growth { growth, stepwise })
}

/// LDU view of a complete sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LduDiagnostics {
    /// Unit lower triangular, pivot order.
    pub l: Matrix,
    /// Diagonal of pivots `p_1, …, p_n`.
    pub d: Matrix,
    /// Unit upper triangular, pivot order.
    pub u: Matrix,
    pub row_order: Vec<usize>,
    pub col_order: Vec<usize>,
    pub norm_l_inv: f64,
    pub norm_u_inv: f64,
    pub norm_d_inv: f64,
    pub norm_a_inv: f64,
    /// `|p_n| · ‖A⁻¹‖`, the last pivot relative to `σ_n(A)`.
    pub r_m: f64,
    pub last_pivot: f64,
    pub realized_growth: f64,
    pub interchanges_performed: bool,
}

/// Extracts `PAQ = LDU` from a run of `n − 1` steps plus its lookahead.
pub fn ldu_diagnostics(a: &Matrix, result: &CrossResult) -> Result<LduDiagnostics> {
    if !a.is_square() {
        return Err(Error::dim("LDU diagnostics need a square matrix"));
    }
    let n = a.n_rows();
    let Some(last) = result.lookahead.filter(|_| result.steps_completed + 1 == n) else {
        return Err(Error::Precondition(format!(
            "need {} completed steps plus a final pivot, got {} steps",
            n - 1,
            result.steps_completed
        )));
    };
    if last.value == 0.0 {
        return Err(Error::numerical(
            n - 1,
            "final pivot is zero; matrix is singular",
        ));
    }
    let (l11, u) = result.pivot_block_factors();
    let pivots = result.pivot_values_with_lookahead();
    let l = Matrix::from_fn(n, n, |i, j| l11[(i, j)] / pivots[j]);
    let d = Matrix::diag(&pivots);

    let mut row_order = result.row_indices();
    row_order.push(last.row);
    let mut col_order = result.col_indices();
    col_order.push(last.col);
    let interchanges_performed = row_order
        .iter()
        .zip(&col_order)
        .enumerate()
        .any(|(k, (&i, &j))| i != k || j != k);

    let norm_a_inv = spectral_norm(&inverse(a)?);
    let growth = realized_growth(&pivots, a)
        .map(|g| g.growth)
        .unwrap_or(f64::NAN);
    Ok(LduDiagnostics {
        norm_l_inv: spectral_norm(&inverse(&l)?),
        norm_u_inv: spectral_norm(&inverse(&u)?),
        norm_d_inv: pivots.iter().map(|p| 1.0 / p.abs()).fold(0.0, f64::max),
        norm_a_inv,
        r_m: last.value.abs() * norm_a_inv,
        last_pivot: last.value,
        realized_growth: growth,
        interchanges_performed,
        l,
        d,
        u,
        row_order,
        col_order,
    })
}
