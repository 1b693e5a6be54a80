//! Dense row-major matrices, index sets and the plain-text matrix format.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense real matrix stored row by row.
///
/// Both dimensions are positive and every entry is finite; both facts are
/// checked by every constructor that accepts caller data.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!(
                "matrix must be nonempty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite entry at ({}, {})",
                pos / cols + 1,
                pos % cols + 1
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::dim("ragged rows"));
        }
        Matrix::new(n_rows, n_cols, rows.concat())
    }

    /// Builds a matrix from a generator. Panics on zero dimensions or
    /// non-finite output, which are programming errors at the call site.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        Matrix::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                values[i]
            } else {
                0.0
            }
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| c * self[(i, j)])
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim("shape mismatch in subtraction"));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] - other[(i, j)]
        }))
    }

    /// `A(rows, cols)`; indices may repeat and appear in any order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Matrix> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::dim("empty selection"));
        }
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::dim(format!("row index {i} out of range")));
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::dim(format!("column index {j} out of range")));
        }
        Ok(Matrix::from_fn(rows.len(), cols.len(), |a, b| {
            self[(rows[a], cols[b])]
        }))
    }

    pub fn select_cols(&self, cols: &[usize]) -> Result<Matrix> {
        let all: Vec<usize> = (0..self.rows).collect();
        self.select(&all, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        let all: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &all)
    }

    /// Largest entry modulus, `‖A‖_max`. This is also the operator norm
    /// from the 1-norm to the ∞-norm.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Result<Matrix> {
        Matrix::from_rows(
            &(0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect::<Vec<_>>(),
        )
    }

    /// Parses the whitespace-separated text format: optional `#` comment
    /// lines, a `rows cols` header, then one line per row.
    pub fn parse(text: &str) -> Result<Matrix> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = loop {
            match lines.next() {
                Some((_, l)) if l.starts_with('#') => continue,
                Some(found) => break found,
                None => return Err(Error::Parse("missing header line".into())),
            }
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad dimension `{t}`", header_line + 1))
                })
            })
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!(
                "line {}: header must be `n_rows n_cols`",
                header_line + 1
            )));
        };
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("matrix dimensions must be positive".into()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {rows} rows, found {r}")))?;
            let before = data.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad number `{tok}`", line_no + 1))
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse(format!(
                        "line {}: non-finite entry",
                        line_no + 1
                    )));
                }
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!(
                    "line {}: expected {cols} entries, found {}",
                    line_no + 1,
                    data.len() - before
                )));
            }
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse(format!("line {}: trailing data", line_no + 1)));
        }
        Matrix::new(rows, cols, data)
    }

    /// Serializes in the text format accepted by [`Matrix::parse`], using
    /// shortest round-trip decimal representations.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|&v| format_number(v)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

/// Shortest decimal string that parses back to exactly `v`. Plain notation
/// in the usual range, scientific otherwise.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Strictly increasing list of 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!(
                "index set must be strictly increasing, got {indices:?}"
            )));
        }
        Ok(IndexSet(indices))
    }

    /// Sorts and validates an unordered list.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        IndexSet::new(indices)
    }

    pub fn range(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Checks that every index is below `bound`.
    pub fn check_bound(&self, bound: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= bound => Err(Error::dim(format!(
                "index {last} out of range for dimension {bound}"
            ))),
            _ => Ok(()),
        }
    }

    /// 1-based copy for reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_norm_examples() {
        let a = Matrix::from_rows(&[vec![1.0, -3.0], vec![2.0, 0.5]]).unwrap();
        assert_eq!(a.max_norm(), 3.0);
        assert_eq!(Matrix::identity(4).max_norm(), 1.0);
        assert_eq!(Matrix::zeros(3, 3).max_norm(), 0.0);
    }

    #[test]
    fn max_norm_is_max_over_basis_images() {
        let a = Matrix::from_rows(&[vec![0.3, -7.0, 1.0], vec![2.0, 0.5, -6.9]]).unwrap();
        let by_columns = (0..a.n_cols())
            .map(|j| a.col(j).iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            .fold(0.0_f64, f64::max);
        assert_eq!(a.max_norm(), by_columns);
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(matches!(
            Matrix::new(0, 3, vec![]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0]),
            Err(Error::Dimension(_))
        ));
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn parse_and_write() {
        let text = "# a comment\n# another\n2 3\n1 2.5 -3\n0 1e-3 4\n";
        let a = Matrix::parse(text).unwrap();
        assert_eq!(a.n_rows(), 2);
        assert_eq!(a[(1, 1)], 1e-3);
        let back = Matrix::parse(&a.to_text()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Matrix::parse(""), Err(Error::Parse(_))));
        assert!(matches!(Matrix::parse("2 2\n1 2\n"), Err(Error::Parse(_))));
        assert!(matches!(Matrix::parse("1 2\n1 x\n"), Err(Error::Parse(_))));
        assert!(matches!(
            Matrix::parse("1 2\n1 2 3\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(Matrix::parse("1 1\n1\n2\n"), Err(Error::Parse(_))));
        assert!(matches!(Matrix::parse("1 1\nnan\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn number_format_round_trips() {
        for v in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1.0 / 3.0,
            1e-300,
            6.02e23,
            -2.5e-7,
            f64::MAX,
        ] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![0, 2, 5]).is_ok());
        assert!(IndexSet::new(vec![2, 2]).is_err());
        assert!(IndexSet::new(vec![3, 1]).is_err());
        assert_eq!(
            IndexSet::from_unsorted(vec![3, 1]).unwrap().as_slice(),
            &[1, 3]
        );
        assert!(IndexSet::new(vec![0, 4]).unwrap().check_bound(4).is_err());
        assert_eq!(IndexSet::range(2).one_based(), vec![1, 2]);
    }
}
