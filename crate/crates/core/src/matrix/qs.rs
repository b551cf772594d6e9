use super::BitMatrix;
use crate::error::{Error, Result};

/// One closure step of the query set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QsOp {
    /// New row `i` is old row `perm[i]`.
    PermuteRows(Vec<usize>),
    PermuteCols(Vec<usize>),
    /// Keep the listed rows; indices strictly increasing.
    SelectRows(Vec<usize>),
    SelectCols(Vec<usize>),
    /// Row `i` is repeated `mult[i] >= 1` times, copies kept adjacent.
    DuplicateRows(Vec<usize>),
    DuplicateCols(Vec<usize>),
}

/// An ordered list of closure steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QsOpSpec(pub Vec<QsOp>);

impl QsOpSpec {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn then(mut self, op: QsOp) -> Self {
        self.0.push(op);
        self
    }

    /// Concatenation: apply `self`, then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).cloned().collect())
    }
}

fn check_permutation(perm: &[usize], len: usize) -> std::result::Result<(), String> {
    if perm.len() != len {
        return Err(format!("permutation of length {} for {len} lines", perm.len()));
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(format!("{perm:?} is not a bijection on 0..{len}"));
        }
    }
    Ok(())
}

fn check_subset(idx: &[usize], len: usize) -> std::result::Result<(), String> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= len) {
        return Err(format!("index {bad} out of range 0..{len}"));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("{idx:?} is not strictly increasing"));
    }
    Ok(())
}

fn expand_multiplicity(mult: &[usize], len: usize) -> std::result::Result<Vec<usize>, String> {
    if mult.len() != len {
        return Err(format!("multiplicity map of length {} for {len} lines", mult.len()));
    }
    if let Some(i) = mult.iter().position(|&m| m == 0) {
        return Err(format!("multiplicity of line {i} is zero"));
    }
    Ok(mult
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| std::iter::repeat_n(i, m))
        .collect())
}

/// Applies `spec` to `m`, transporting labels with their rows and columns.
pub fn apply_qs_ops(m: &BitMatrix, spec: &QsOpSpec) -> Result<BitMatrix> {
    // Every step is an index map; compose them and gather once.
    let mut rows: Vec<usize> = (0..m.rows()).collect();
    let mut cols: Vec<usize> = (0..m.cols()).collect();
    for (step, op) in spec.0.iter().enumerate() {
        let fail = |reason: String| Error::BadQsStep { step, reason };
        match op {
            QsOp::PermuteRows(p) => {
                check_permutation(p, rows.len()).map_err(fail)?;
                rows = p.iter().map(|&i| rows[i]).collect();
            }
            QsOp::PermuteCols(p) => {
                check_permutation(p, cols.len()).map_err(fail)?;
                cols = p.iter().map(|&i| cols[i]).collect();
            }
            QsOp::SelectRows(s) => {
                check_subset(s, rows.len()).map_err(fail)?;
                rows = s.iter().map(|&i| rows[i]).collect();
            }
            QsOp::SelectCols(s) => {
                check_subset(s, cols.len()).map_err(fail)?;
                cols = s.iter().map(|&i| cols[i]).collect();
            }
            QsOp::DuplicateRows(mult) => {
                let idx = expand_multiplicity(mult, rows.len()).map_err(fail)?;
                rows = idx.into_iter().map(|i| rows[i]).collect();
            }
            QsOp::DuplicateCols(mult) => {
                let idx = expand_multiplicity(mult, cols.len()).map_err(fail)?;
                cols = idx.into_iter().map(|i| cols[i]).collect();
            }
        }
    }
    Ok(m.submatrix(&rows, &cols))
}
