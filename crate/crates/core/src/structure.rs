//! VC dimension and largest Greater-Than subproblem.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, Embedding};

pub const MAX_VC_CAP: usize = 20;

/// Distinct row vectors of `m`, each with the first row index that carries it.
fn distinct_rows(m: &BitMatrix) -> (Vec<BitString>, Vec<usize>) {
    let mut seen: HashMap<&BitString, ()> = HashMap::new();
    let mut vecs = Vec::new();
    let mut idx = Vec::new();
    for (r, row) in m.row_vectors().iter().enumerate() {
        if seen.insert(row, ()).is_none() {
            vecs.push(row.clone());
            idx.push(r);
        }
    }
    (vecs, idx)
}

/// `m` restricted to distinct rows and distinct columns, with the original
/// index of each kept line.
fn dedup(m: &BitMatrix) -> (BitMatrix, Vec<usize>, Vec<usize>) {
    let (_, rows) = distinct_rows(m);
    let (_, cols) = distinct_rows(&m.transpose());
    (m.submatrix(&rows, &cols), rows, cols)
}

struct VcSearch<'a> {
    cols: &'a BitMatrix, // transposed, deduplicated: one row per column
    cap: usize,
    budget: u64,
    spent: u64,
    best: usize,
}

impl VcSearch<'_> {
    // `patterns[r]` encodes the projection of row r onto the current column
    // set; they are shattered iff all 2^|set| patterns occur.
    fn extend(&mut self, size: usize, next: usize, patterns: &[u32]) -> Result<()> {
        if size == self.cap {
            return Ok(());
        }
        let rows = patterns.len();
        if rows < 1 << (self.best + 1) {
            return Ok(());
        }
        for c in next..self.cols.rows() {
            // Even shattering every remaining column cannot beat `best`.
            if size + (self.cols.rows() - c) <= self.best {
                break;
            }
            self.spent += 1;
            if self.spent > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            let col = self.cols.row(c);
            let grown: Vec<u32> = patterns
                .iter()
                .enumerate()
                .map(|(r, &p)| (p << 1) | col.get(r) as u32)
                .collect();
            let mut seen = vec![false; 1 << (size + 1)];
            let mut count = 0usize;
            for &p in &grown {
                if !std::mem::replace(&mut seen[p as usize], true) {
                    count += 1;
                }
            }
            if count == 1 << (size + 1) {
                self.best = self.best.max(size + 1);
                if self.best == self.cap {
                    return Ok(());
                }
                self.extend(size + 1, c + 1, &grown)?;
                if self.best == self.cap {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Largest `d <= cap` such that some `d` columns of `m` are shattered by its
/// rows. A matrix without rows has VC dimension 0.
pub fn vc_dimension(m: &BitMatrix, cap: usize, budget: u64) -> Result<usize> {
    if cap > MAX_VC_CAP {
        return Err(Error::Parameter(format!("cap {cap} exceeds {MAX_VC_CAP}")));
    }
    if m.rows() == 0 {
        return Ok(0);
    }
    let (d, _, _) = dedup(m);
    let t = d.transpose();
    let mut search = VcSearch {
        cols: &t,
        cap,
        budget,
        spent: 0,
        best: 0,
    };
    search.extend(0, 0, &vec![0u32; d.rows()])?;
    Ok(search.best)
}

/// Sizes of the largest Greater-Than and negated Greater-Than embeddings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GtReport {
    /// Largest `t` with `GT_t` embedded (`i <= j` pattern).
    pub max_gt: usize,
    /// Largest `t` with the complement of `GT_t` embedded.
    pub max_negated_gt: usize,
    /// The search stopped at the cap: the true value is at least `max_gt`.
    pub gt_capped: bool,
    pub negated_capped: bool,
    /// Rows `x_1..x_t` and columns `y_1..y_t` of `m`.
    pub gt_witness: Embedding,
    pub negated_witness: Embedding,
}

struct GtSearch<'a> {
    m: &'a BitMatrix,
    t: &'a BitMatrix,
    cap: usize,
    budget: u64,
    spent: u64,
    rows: Vec<usize>,
    cols: Vec<usize>,
    best: Embedding,
}

impl GtSearch<'_> {
    /// `row_cand`: rows that are 0 on every chosen column; `col_cand`:
    /// columns that are 1 on every chosen row.
    fn extend(&mut self, row_cand: &BitString, col_cand: &BitString) -> Result<()> {
        let depth = self.rows.len();
        if depth > self.best.rows.len() {
            self.best = Embedding {
                rows: self.rows.clone(),
                cols: self.cols.clone(),
            };
        }
        if depth == self.cap {
            return Ok(());
        }
        let bound = depth + row_cand.count_ones().min(col_cand.count_ones());
        if bound <= self.best.rows.len() {
            return Ok(());
        }
        for x in row_cand.ones_positions() {
            let mut cols_x = col_cand.clone();
            cols_x.and_assign(self.m.row(x));
            for y in cols_x.ones_positions() {
                self.spent += 1;
                if self.spent > self.budget {
                    return Err(Error::BudgetExceeded { budget: self.budget });
                }
                let mut rows_next = row_cand.clone();
                rows_next.and_not_assign(self.t.row(y));
                self.rows.push(x);
                self.cols.push(y);
                self.extend(&rows_next, &cols_x)?;
                self.rows.pop();
                self.cols.pop();
                if self.best.rows.len() == self.cap {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

fn largest_gt(m: &BitMatrix, cap: usize, budget: u64) -> Result<Embedding> {
    let (d, row_idx, col_idx) = dedup(m);
    let t = d.transpose();
    let mut search = GtSearch {
        m: &d,
        t: &t,
        cap,
        budget,
        spent: 0,
        rows: Vec::new(),
        cols: Vec::new(),
        best: Embedding {
            rows: Vec::new(),
            cols: Vec::new(),
        },
    };
    search.extend(&BitString::ones(d.rows()), &BitString::ones(d.cols()))?;
    Ok(Embedding {
        rows: search.best.rows.iter().map(|&r| row_idx[r]).collect(),
        cols: search.best.cols.iter().map(|&c| col_idx[c]).collect(),
    })
}

/// Exact largest `GT_t` and negated `GT_t` embeddings, up to `cap`.
///
/// Rows and columns may be taken in any order; duplicated lines are
/// collapsed first since a Greater-Than pattern never reuses a vector.
pub fn max_gt_size(m: &BitMatrix, cap: usize, budget: u64) -> Result<GtReport> {
    let gt = largest_gt(m, cap, budget)?;
    let neg = largest_gt(&m.negate(), cap, budget)?;
    Ok(GtReport {
        max_gt: gt.rows.len(),
        max_negated_gt: neg.rows.len(),
        gt_capped: gt.rows.len() == cap,
        negated_capped: neg.rows.len() == cap,
        gt_witness: gt,
        negated_witness: neg,
    })
}

/// True iff neither `GT_t` nor its negation embeds in `m`.
pub fn is_stable_upto(m: &BitMatrix, t: usize, budget: u64) -> Result<bool> {
    let report = max_gt_size(m, t, budget)?;
    Ok(report.max_gt < t && report.max_negated_gt < t)
}
