//! Boolean and partial matrices, query-set closure operations and pattern
//! containment.
//!
//! All indices are 0-based. Row `i` of a problem stated over `[t]` is row
//! `i - 1` here.

mod pattern;
mod qs;
mod text;

pub use pattern::{contains_pattern, Embedding, DEFAULT_SEARCH_BUDGET};
pub use qs::{apply_qs_ops, QsOp, QsOpSpec};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Bitstring labels attached to the rows and columns of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    dim: usize,
    rows: Vec<BitString>,
    cols: Vec<BitString>,
}

impl Labels {
    pub fn new(dim: usize, rows: Vec<BitString>, cols: Vec<BitString>) -> Result<Self> {
        for l in rows.iter().chain(&cols) {
            if l.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    found: l.len(),
                });
            }
        }
        Ok(Self { dim, rows, cols })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn cols(&self) -> &[BitString] {
        &self.cols
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self {
            dim: self.dim,
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
            cols: cols.iter().map(|&c| self.cols[c].clone()).collect(),
        }
    }

    fn transposed(&self) -> Self {
        Self {
            dim: self.dim,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }
}

/// Dense Boolean matrix, stored row-major as packed bitstrings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitString>,
    labels: Option<Labels>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitString::zeros(cols); rows],
            labels: None,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let rows = (0..rows)
            .map(|r| BitString::from_bits((0..cols).map(|c| f(r, c))))
            .collect();
        Self {
            cols,
            rows,
            labels: None,
        }
    }

    /// Builds a matrix from row bitstrings of equal length.
    pub fn from_rows(rows: Vec<BitString>) -> Result<Self> {
        let cols = rows.first().map_or(0, BitString::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self {
            cols,
            rows,
            labels: None,
        })
    }

    /// Matrix whose `(x, y)` entry is `f(x, y)` over the given labels.
    pub fn from_labels(
        row_labels: Vec<BitString>,
        col_labels: Vec<BitString>,
        mut f: impl FnMut(&BitString, &BitString) -> bool,
    ) -> Result<Self> {
        let dim = row_labels.first().or(col_labels.first()).map_or(0, BitString::len);
        let labels = Labels::new(dim, row_labels, col_labels)?;
        let mut m = Self::from_fn(labels.rows.len(), labels.cols.len(), |r, c| {
            f(&labels.rows[r], &labels.cols[c])
        });
        m.labels = Some(labels);
        Ok(m)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.rows.len() != self.rows() || labels.cols.len() != self.cols() {
            return Err(Error::Shape(format!(
                "{}x{} labels for a {}x{} matrix",
                labels.rows.len(),
                labels.cols.len(),
                self.rows(),
                self.cols()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// Row `r` as a bitstring over the columns.
    pub fn row(&self, r: usize) -> &BitString {
        &self.rows[r]
    }

    pub fn row_vectors(&self) -> &[BitString] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn require_labels(&self) -> Result<&Labels> {
        self.labels.as_ref().ok_or(Error::MissingLabels)
    }

    /// Entry at the row and column carrying the given labels.
    pub fn get_by_labels(&self, x: &BitString, y: &BitString) -> Option<bool> {
        let labels = self.labels.as_ref()?;
        let r = labels.rows.iter().position(|l| l == x)?;
        let c = labels.cols.iter().position(|l| l == y)?;
        Some(self.get(r, c))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::from_fn(self.cols, self.rows(), |r, c| self.get(c, r));
        t.labels = self.labels.as_ref().map(Labels::transposed);
        t
    }

    /// Entrywise complement.
    pub fn negate(&self) -> Self {
        Self {
            cols: self.cols,
            rows: self.rows.iter().map(BitString::complement).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Rows `rows` and columns `cols`, in the given order; repeats allowed.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let out_rows = rows.iter().map(|&r| self.rows[r].project(cols)).collect();
        Self {
            cols: cols.len(),
            rows: out_rows,
            labels: self.labels.as_ref().map(|l| l.select(rows, cols)),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(BitString::count_ones).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows() == self.cols && (0..self.rows()).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Whether every entry is equal.
    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.rows() * self.cols
    }
}

/// A matrix over `{0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<Option<bool>>,
    labels: Option<Labels>,
}

impl PartialMatrix {
    pub fn stars(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![None; rows * cols],
            labels: None,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Option<bool>) -> Self {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(f(r, c));
            }
        }
        Self {
            rows,
            cols,
            cells,
            labels: None,
        }
    }

    /// Parses rows written over `0`, `1` and `*`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::new();
        for (line, r) in rows.iter().enumerate() {
            let parsed = text::parse_cells(r, line, width, true)?;
            cells.extend(parsed);
        }
        Ok(Self {
            rows: rows.len(),
            cols: width,
            cells,
            labels: None,
        })
    }

    pub fn from_labels(
        row_labels: Vec<BitString>,
        col_labels: Vec<BitString>,
        mut f: impl FnMut(&BitString, &BitString) -> Option<bool>,
    ) -> Result<Self> {
        let dim = row_labels.first().or(col_labels.first()).map_or(0, BitString::len);
        let labels = Labels::new(dim, row_labels, col_labels)?;
        let mut m = Self::from_fn(labels.rows.len(), labels.cols.len(), |r, c| {
            f(&labels.rows[r], &labels.cols[c])
        });
        m.labels = Some(labels);
        Ok(m)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.rows.len() != self.rows || labels.cols.len() != self.cols {
            return Err(Error::Shape(format!(
                "{}x{} labels for a {}x{} matrix",
                labels.rows.len(),
                labels.cols.len(),
                self.rows,
                self.cols
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `None` is the `*` entry.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Option<bool> {
        assert!(r < self.rows && c < self.cols);
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Option<bool>) {
        assert!(r < self.rows && c < self.cols);
        self.cells[r * self.cols + c] = value;
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn require_labels(&self) -> Result<&Labels> {
        self.labels.as_ref().ok_or(Error::MissingLabels)
    }

    /// Complements every non-`*` entry.
    pub fn negate(&self) -> Self {
        Self {
            cells: self.cells.iter().map(|c| c.map(|b| !b)).collect(),
            ..self.clone()
        }
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// Replaces every `*` by `fill(r, c)`.
    pub fn complete_with(&self, mut fill: impl FnMut(usize, usize) -> bool) -> BitMatrix {
        let m = BitMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c).unwrap_or_else(|| fill(r, c))
        });
        BitMatrix {
            labels: self.labels.clone(),
            ..m
        }
    }

    /// Whether `m` agrees with every non-`*` entry.
    pub fn is_completed_by(&self, m: &BitMatrix) -> bool {
        m.rows() == self.rows
            && m.cols() == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c).is_none_or(|v| v == m.get(r, c))))
    }

    /// Row vectors over `{0,1,*}`, used for distinctness checks.
    pub fn row_cells(&self, r: usize) -> &[Option<bool>] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col_cells(&self, c: usize) -> Vec<Option<bool>> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

impl From<&BitMatrix> for PartialMatrix {
    fn from(m: &BitMatrix) -> Self {
        let mut p = PartialMatrix::from_fn(m.rows(), m.cols(), |r, c| Some(m.get(r, c)));
        p.labels = m.labels.clone();
        p
    }
}

impl TryFrom<&PartialMatrix> for BitMatrix {
    type Error = Error;

    fn try_from(p: &PartialMatrix) -> Result<Self> {
        if !p.is_total() {
            return Err(Error::Shape("partial matrix has * entries".into()));
        }
        Ok(p.complete_with(|_, _| false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows.iter().map(|r| r.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn negate_examples() {
        assert_eq!(m(&["10", "01"]).negate(), m(&["01", "10"]));
        let a = m(&["110", "011"]);
        assert_eq!(a.negate().negate(), a);
        assert_eq!(m(&["111", "111"]).negate(), BitMatrix::zeros(2, 3));
    }

    #[test]
    fn submatrix_carries_labels() {
        let rows = vec!["0".parse().unwrap(), "1".parse().unwrap()];
        let a = BitMatrix::from_labels(rows.clone(), rows, |x, y| x == y).unwrap();
        let s = a.submatrix(&[1, 1], &[0]);
        assert_eq!(
            s,
            BitMatrix::from_labels(
                vec!["1".parse().unwrap(), "1".parse().unwrap()],
                vec!["0".parse().unwrap()],
                |_, _| false,
            )
            .unwrap()
        );
    }

    #[test]
    fn labels_must_share_dimension() {
        let r = BitMatrix::from_labels(vec!["01".parse().unwrap()], vec!["1".parse().unwrap()], |_, _| true);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn partial_completion() {
        let p = PartialMatrix::from_strs(&["1*", "*0"]).unwrap();
        assert!(p.is_completed_by(&m(&["11", "10"])));
        assert!(!p.is_completed_by(&m(&["01", "10"])));
        assert_eq!(p.negate(), PartialMatrix::from_strs(&["0*", "*1"]).unwrap());
        assert_eq!(p.complete_with(|_, _| true), m(&["11", "10"]));
    }
}
