//! Exhaustive search for an occurrence of a partial pattern inside a matrix.

use super::{BitMatrix, PartialMatrix};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Default cap on the number of partial assignments explored.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Row and column index sequences into the host matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

struct Search<'a> {
    m: &'a BitMatrix,
    p: &'a PartialMatrix,
    distinct: bool,
    // Pattern columns with identical content share one candidate set.
    class_of: Vec<usize>,
    class_rep: Vec<usize>,
    class_size: Vec<usize>,
    col_vectors: Option<BitMatrix>,
    budget: u64,
    spent: u64,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Search<'_> {
    fn charge(&mut self) -> Result<()> {
        self.spent += 1;
        if self.spent > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    fn place_rows(&mut self, cand: &[BitString]) -> Result<bool> {
        let depth = self.rows.len();
        if depth == self.p.rows() {
            return self.place_cols(cand);
        }
        let mut next = cand.to_vec();
        'candidate: for r in 0..self.m.rows() {
            let row = self.m.row(r);
            if self.distinct && self.rows.iter().any(|&q| self.m.row(q) == row) {
                continue;
            }
            for (class, set) in next.iter_mut().enumerate() {
                set.clone_from(&cand[class]);
                match self.p.get(depth, self.class_rep[class]) {
                    Some(true) => set.and_assign(row),
                    Some(false) => set.and_not_assign(row),
                    None => {}
                }
                let needed = if self.distinct { self.class_size[class] } else { 1 };
                if set.count_ones() < needed {
                    continue 'candidate;
                }
            }
            self.charge()?;
            self.rows.push(r);
            if self.place_rows(&next)? {
                return Ok(true);
            }
            self.rows.pop();
        }
        Ok(false)
    }

    fn place_cols(&mut self, cand: &[BitString]) -> Result<bool> {
        let j = self.cols.len();
        if j == self.p.cols() {
            return Ok(true);
        }
        for c in cand[self.class_of[j]].ones_positions() {
            if let Some(t) = &self.col_vectors {
                if self.cols.iter().any(|&q| t.row(q) == t.row(c)) {
                    continue;
                }
            }
            self.charge()?;
            self.cols.push(c);
            if self.place_cols(cand)? {
                return Ok(true);
            }
            self.cols.pop();
        }
        Ok(false)
    }
}

/// Finds row and column index sequences of `m` that agree with every
/// non-`*` entry of `p`.
///
/// Candidates are tried rows first, then columns, each in increasing index
/// order, so the first embedding in that lexicographic order is returned.
/// Without `require_distinct` indices may repeat; with it, the chosen row
/// vectors are pairwise distinct and so are the chosen column vectors.
/// `budget` caps the number of partial assignments.
pub fn contains_pattern(
    m: &BitMatrix,
    p: &PartialMatrix,
    require_distinct: bool,
    budget: u64,
) -> Result<Option<Embedding>> {
    let mut class_of = Vec::with_capacity(p.cols());
    let mut class_rep: Vec<usize> = Vec::new();
    let mut class_size: Vec<usize> = Vec::new();
    for j in 0..p.cols() {
        let col = p.col_cells(j);
        match class_rep.iter().position(|&rep| p.col_cells(rep) == col) {
            Some(class) => {
                class_of.push(class);
                class_size[class] += 1;
            }
            None => {
                class_of.push(class_rep.len());
                class_rep.push(j);
                class_size.push(1);
            }
        }
    }
    let mut search = Search {
        m,
        p,
        distinct: require_distinct,
        col_vectors: require_distinct.then(|| m.transpose()),
        class_of,
        class_size,
        budget,
        spent: 0,
        rows: Vec::new(),
        cols: Vec::new(),
        class_rep,
    };
    let start = vec![BitString::ones(m.cols()); search.class_rep.len()];
    if search.place_rows(&start)? {
        Ok(Some(Embedding {
            rows: search.rows,
            cols: search.cols,
        }))
    } else {
        Ok(None)
    }
}
