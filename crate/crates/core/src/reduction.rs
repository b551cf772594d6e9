//! Constant-cost reductions on small instances.
//!
//! A witness is a list of query matrices `Q_1..Q_c` together with a truth
//! table `f` such that the target equals `f(Q_1, .., Q_c)` entrywise.
//! Query `i` contributes bit `i` of the truth-table index.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use crate::error::{Error, ParseError, Result};
use crate::matrix::BitMatrix;

/// Default candidate budget for [`search_reduction`].
pub const DEFAULT_REDUCTION_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionWitness {
    pub queries: Vec<BitMatrix>,
    pub f: Vec<bool>,
}

impl ReductionWitness {
    pub fn new(queries: Vec<BitMatrix>, f: Vec<bool>) -> Result<Self> {
        if queries.len() > 24 {
            return Err(Error::Parameter(format!(
                "{} queries is too many for a truth table",
                queries.len()
            )));
        }
        if f.len() != 1 << queries.len() {
            return Err(Error::LengthMismatch {
                expected: 1 << queries.len(),
                found: f.len(),
            });
        }
        if let Some(q) = queries.first() {
            if queries.iter().any(|o| (o.rows(), o.cols()) != (q.rows(), q.cols())) {
                return Err(Error::Shape("queries differ in shape".into()));
            }
        }
        Ok(Self { queries, f })
    }

    pub fn c(&self) -> usize {
        self.queries.len()
    }

    /// Truth-table index formed from the query answers at `(x, y)`.
    pub fn answers(&self, x: usize, y: usize) -> usize {
        self.queries
            .iter()
            .enumerate()
            .fold(0, |acc, (i, q)| acc | (q.get(x, y) as usize) << i)
    }

    pub fn evaluate(&self, x: usize, y: usize) -> bool {
        self.f[self.answers(x, y)]
    }

    /// The truth table as a string of length `2^c`, entry `a` at position `a`.
    pub fn f_string(&self) -> String {
        self.f.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            queries: self.queries.clone(),
            f: self.f.iter().map(|b| !b).collect(),
        }
    }
}

/// Text form: a line `witness <c> <f>` with the truth table as a 0/1
/// string of length `2^c`, followed by the `c` queries in matrix text format.
impl fmt::Display for ReductionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "witness {} {}", self.c(), self.f_string())?;
        for q in &self.queries {
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

impl FromStr for ReductionWitness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s.lines().collect();
        let header = lines.first().ok_or(ParseError::Truncated { expected: 1 })?;
        let bad = |reason: &str| ParseError::BadHeader {
            line: 1,
            reason: reason.into(),
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (c, table) = match parts[..] {
            ["witness", c, table] => (c.parse::<usize>().map_err(|_| bad("bad query count"))?, table),
            ["witness", c] => (c.parse::<usize>().map_err(|_| bad("bad query count"))?, ""),
            _ => return Err(bad("expected `witness <c> <f>`").into()),
        };
        let f = table
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad("truth table must be a 0/1 string")),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        let mut queries = Vec::with_capacity(c);
        let mut at = 1;
        for _ in 0..c {
            let head = lines.get(at).ok_or(ParseError::Truncated { expected: 1 })?;
            let nums: Vec<usize> = head.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            let span = match nums[..] {
                [r, _] => 1 + r,
                [r, c, _] => 1 + 2 * r + c,
                _ => {
                    return Err(ParseError::BadHeader {
                        line: at + 1,
                        reason: "expected a matrix header".into(),
                    }
                    .into())
                }
            };
            if at + span > lines.len() {
                return Err(ParseError::Truncated {
                    expected: at + span - lines.len(),
                }
                .into());
            }
            let text = lines[at..at + span].join("\n");
            queries.push(text.parse::<BitMatrix>()?);
            at += span;
        }
        if lines[at..].iter().any(|l| !l.trim().is_empty()) {
            return Err(ParseError::TrailingContent { line: at + 1 }.into());
        }
        Self::new(queries, f)
    }
}

/// Checks the entrywise identity `target = f(Q_1, .., Q_c)`.
pub fn verify_witness(target: &BitMatrix, w: &ReductionWitness) -> Result<bool> {
    if w.f.len() != 1 << w.c() {
        return Err(Error::LengthMismatch {
            expected: 1 << w.c(),
            found: w.f.len(),
        });
    }
    for q in &w.queries {
        if (q.rows(), q.cols()) != (target.rows(), target.cols()) {
            return Err(Error::Shape(format!(
                "query is {}x{}, target is {}x{}",
                q.rows(),
                q.cols(),
                target.rows(),
                target.cols()
            )));
        }
    }
    for x in 0..target.rows() {
        for y in 0..target.cols() {
            if w.evaluate(x, y) != target.get(x, y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Canonical form of a matrix in the query set of Equality:
/// `Q(x, y) = 1` iff `rows[x] == cols[y]` and both are labelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockyLabeling {
    pub rows: Vec<Option<usize>>,
    pub cols: Vec<Option<usize>>,
}

impl BlockyLabeling {
    pub fn to_matrix(&self) -> BitMatrix {
        BitMatrix::from_fn(
            self.rows.len(),
            self.cols.len(),
            |x, y| matches!((self.rows[x], self.cols[y]), (Some(a), Some(b)) if a == b),
        )
    }

    pub fn num_labels(&self) -> usize {
        self.rows.iter().flatten().max().map_or(0, |m| m + 1)
    }
}

/// Decides whether `m` is blocky: rows whose 1-sets intersect have equal
/// 1-sets. Labels are assigned in order of first appearance.
pub fn is_blocky(m: &BitMatrix) -> Option<BlockyLabeling> {
    let mut patterns: Vec<&crate::BitString> = Vec::new();
    let mut rows = Vec::with_capacity(m.rows());
    let mut union = crate::BitString::zeros(m.cols());
    for r in m.row_vectors() {
        if r.is_zero() {
            rows.push(None);
            continue;
        }
        match patterns.iter().position(|p| *p == r) {
            Some(l) => rows.push(Some(l)),
            None => {
                if union.intersects(r) {
                    return None;
                }
                union = union.xor(r);
                rows.push(Some(patterns.len()));
                patterns.push(r);
            }
        }
    }
    let cols = (0..m.cols()).map(|y| patterns.iter().position(|p| p.get(y))).collect();
    Some(BlockyLabeling { rows, cols })
}

/// A family of candidate query matrices of a fixed shape.
pub trait QueryEnumerator {
    fn name(&self) -> &str;

    /// Visits candidates until `visit` breaks. Visiting more than `budget`
    /// candidates is an error.
    fn for_each(
        &self,
        rows: usize,
        cols: usize,
        budget: u64,
        visit: &mut dyn FnMut(&BitMatrix) -> ControlFlow<()>,
    ) -> Result<()>;

    fn contains(&self, m: &BitMatrix) -> bool;
}

/// Enumerates the query set of Equality through canonical blocky labelings.
#[derive(Clone, Copy, Debug, Default)]
pub struct BlockyEnumerator;

struct BlockyWalk<'a> {
    rows: usize,
    cols: usize,
    row_labels: Vec<Option<usize>>,
    col_labels: Vec<Option<usize>>,
    budget: u64,
    spent: u64,
    visit: &'a mut dyn FnMut(&BitMatrix) -> ControlFlow<()>,
}

impl BlockyWalk<'_> {
    fn rows_from(&mut self, x: usize, used: usize) -> Result<ControlFlow<()>> {
        if x == self.rows {
            return self.cols_from(0, used, 0);
        }
        for choice in 0..=used + 1 {
            let (label, next_used) = match choice {
                0 => (None, used),
                c if c <= used => (Some(c - 1), used),
                _ => (Some(used), used + 1),
            };
            self.row_labels[x] = label;
            if self.rows_from(x + 1, next_used)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn cols_from(&mut self, y: usize, labels: usize, covered: u64) -> Result<ControlFlow<()>> {
        let missing = labels - covered.count_ones() as usize;
        if missing > self.cols - y {
            return Ok(ControlFlow::Continue(()));
        }
        if y == self.cols {
            self.spent += 1;
            if self.spent > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            let m = BlockyLabeling {
                rows: self.row_labels.clone(),
                cols: self.col_labels.clone(),
            }
            .to_matrix();
            return Ok((self.visit)(&m));
        }
        let options = std::iter::once(None).chain((0..labels).map(Some));
        for label in options {
            self.col_labels[y] = label;
            let covered = label.map_or(covered, |l| covered | 1 << l);
            if self.cols_from(y + 1, labels, covered)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

impl QueryEnumerator for BlockyEnumerator {
    fn name(&self) -> &str {
        "blocky"
    }

    fn for_each(
        &self,
        rows: usize,
        cols: usize,
        budget: u64,
        visit: &mut dyn FnMut(&BitMatrix) -> ControlFlow<()>,
    ) -> Result<()> {
        if rows > 64 {
            return Err(Error::Parameter("blocky enumeration supports at most 64 rows".into()));
        }
        let mut walk = BlockyWalk {
            rows,
            cols,
            row_labels: vec![None; rows],
            col_labels: vec![None; cols],
            budget,
            spent: 0,
            visit,
        };
        walk.rows_from(0, 0).map(|_| ())
    }

    fn contains(&self, m: &BitMatrix) -> bool {
        is_blocky(m).is_some()
    }
}

/// Search settings. Two-query search is opt-in.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub budget: u64,
    pub allow_pairs: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_REDUCTION_BUDGET,
            allow_pairs: false,
        }
    }
}

fn first_candidate(target: &BitMatrix, e: &dyn QueryEnumerator, budget: u64) -> Result<Option<BitMatrix>> {
    let mut found = None;
    e.for_each(target.rows(), target.cols(), budget, &mut |q| {
        found = Some(q.clone());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

fn fit_pair(target: &BitMatrix, q1: &BitMatrix, q2: &BitMatrix) -> Option<Vec<bool>> {
    let mut table = [None; 4];
    for x in 0..target.rows() {
        for y in 0..target.cols() {
            let a = q1.get(x, y) as usize | (q2.get(x, y) as usize) << 1;
            let t = target.get(x, y);
            match table[a] {
                None => table[a] = Some(t),
                Some(v) if v != t => return None,
                _ => {}
            }
        }
    }
    Some(table.iter().map(|v| v.unwrap_or(false)).collect())
}

/// Looks for a witness with exactly `c` queries drawn from `enumerator`.
pub fn search_reduction(
    target: &BitMatrix,
    enumerator: &dyn QueryEnumerator,
    c: usize,
    options: SearchOptions,
) -> Result<Option<ReductionWitness>> {
    let constant = target
        .is_constant()
        .then(|| target.rows() > 0 && target.cols() > 0 && target.get(0, 0));
    let witness = match c {
        0 => constant.map(|v| ReductionWitness {
            queries: vec![],
            f: vec![v],
        }),
        1 => {
            if let Some(v) = constant {
                first_candidate(target, enumerator, options.budget)?.map(|q| ReductionWitness {
                    queries: vec![q],
                    f: vec![v, v],
                })
            } else if enumerator.contains(target) {
                Some(ReductionWitness {
                    queries: vec![target.clone()],
                    f: vec![false, true],
                })
            } else {
                let neg = target.negate();
                enumerator.contains(&neg).then(|| ReductionWitness {
                    queries: vec![neg],
                    f: vec![true, false],
                })
            }
        }
        2 if !options.allow_pairs => {
            return Err(Error::Parameter("two-query search must be enabled explicitly".into()));
        }
        2 => {
            let mut candidates = Vec::new();
            enumerator.for_each(target.rows(), target.cols(), options.budget, &mut |q| {
                candidates.push(q.clone());
                ControlFlow::Continue(())
            })?;
            let mut spent = 0u64;
            let mut found = None;
            'outer: for (i, q1) in candidates.iter().enumerate() {
                for q2 in &candidates[i..] {
                    spent += 1;
                    if spent > options.budget {
                        return Err(Error::BudgetExceeded { budget: options.budget });
                    }
                    if let Some(f) = fit_pair(target, q1, q2) {
                        found = Some(ReductionWitness {
                            queries: vec![q1.clone(), q2.clone()],
                            f,
                        });
                        break 'outer;
                    }
                }
            }
            found
        }
        _ => return Err(Error::Parameter(format!("c = {c} is above the supported maximum of 2"))),
    };
    debug_assert!(witness.as_ref().is_none_or(|w| verify_witness(target, w) == Ok(true)));
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_ehd, gen_equality};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // rows with a common 1 must agree everywhere
    fn blocky_oracle(m: &BitMatrix) -> bool {
        let (r, c) = (m.rows(), m.cols());
        for x in 0..r {
            for x2 in 0..r {
                for y in 0..c {
                    for y2 in 0..c {
                        if m.get(x, y) && m.get(x2, y) && m.get(x, y2) && !m.get(x2, y2) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, p: f64) -> BitMatrix {
        BitMatrix::from_fn(r, c, |_, _| rng.gen_bool(p))
    }

    #[test]
    fn equality_is_blocky_with_identity_labels() {
        let l = is_blocky(&gen_equality(3).unwrap()).unwrap();
        let id: Vec<_> = (0..8).map(Some).collect();
        assert_eq!(l.rows, id);
        assert_eq!(l.cols, id);
    }

    #[test]
    fn all_ones_has_one_label() {
        let l = is_blocky(&BitMatrix::from_fn(2, 3, |_, _| true)).unwrap();
        assert_eq!(l.rows, vec![Some(0); 2]);
        assert_eq!(l.cols, vec![Some(0); 3]);
    }

    #[test]
    fn ehd_blocky_facts() {
        assert!(is_blocky(&gen_ehd(2, 1).unwrap()).is_some());
        assert!(is_blocky(&gen_ehd(3, 1).unwrap()).is_none());
    }

    #[test]
    fn blocky_matches_oracle_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3000 {
            let r = rng.gen_range(1..=8);
            let c = rng.gen_range(1..=8);
            // block-structured matrices with noise so both outcomes occur
            let m = if rng.gen_bool(0.5) {
                let a: Vec<Option<usize>> = (0..r).map(|_| rng.gen_bool(0.7).then(|| rng.gen_range(0..3))).collect();
                let b: Vec<Option<usize>> = (0..c).map(|_| rng.gen_bool(0.7).then(|| rng.gen_range(0..3))).collect();
                let mut m = BlockyLabeling { rows: a, cols: b }.to_matrix();
                if rng.gen_bool(0.3) {
                    let (x, y) = (rng.gen_range(0..r), rng.gen_range(0..c));
                    m.set(x, y, !m.get(x, y));
                }
                m
            } else {
                random_matrix(&mut rng, r, c, 0.3)
            };
            let got = is_blocky(&m);
            assert_eq!(got.is_some(), blocky_oracle(&m), "{m}");
            if let Some(l) = got {
                assert_eq!(l.to_matrix(), m);
            }
        }
    }

    #[test]
    fn enumerator_lists_each_blocky_matrix_once() {
        for (r, c) in [(1, 1), (2, 2), (2, 3), (3, 3)] {
            let mut seen = Vec::new();
            BlockyEnumerator
                .for_each(r, c, u64::MAX, &mut |q| {
                    seen.push(q.to_string());
                    ControlFlow::Continue(())
                })
                .unwrap();
            let n = seen.len();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), n);
            let brute = (0..1u32 << (r * c))
                .filter(|bits| blocky_oracle(&BitMatrix::from_fn(r, c, |x, y| bits >> (x * c + y) & 1 == 1)))
                .count();
            assert_eq!(n, brute, "{r}x{c}");
        }
    }

    #[test]
    fn enumerator_budget() {
        let err = BlockyEnumerator
            .for_each(4, 4, 10, &mut |_| ControlFlow::Continue(()))
            .unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn single_query_searches() {
        let eq2 = gen_equality(2).unwrap();
        let w = search_reduction(&eq2, &BlockyEnumerator, 1, SearchOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.queries, vec![eq2.clone()]);
        assert_eq!(w.f, vec![false, true]);

        let ehd21 = gen_ehd(2, 1).unwrap();
        let w = search_reduction(&ehd21, &BlockyEnumerator, 1, SearchOptions::default())
            .unwrap()
            .unwrap();
        assert!(verify_witness(&ehd21, &w).unwrap());

        let ehd31 = gen_ehd(3, 1).unwrap();
        assert!(search_reduction(&ehd31, &BlockyEnumerator, 1, SearchOptions::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn constant_targets() {
        let ones = BitMatrix::from_fn(3, 3, |_, _| true);
        let w = search_reduction(&ones, &BlockyEnumerator, 0, SearchOptions::default())
            .unwrap()
            .unwrap();
        assert!(verify_witness(&ones, &w).unwrap());
        let w = search_reduction(&ones, &BlockyEnumerator, 1, SearchOptions::default())
            .unwrap()
            .unwrap();
        assert!(verify_witness(&ones, &w).unwrap());
        let eq = gen_equality(1).unwrap();
        assert!(search_reduction(&eq, &BlockyEnumerator, 0, SearchOptions::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn negation_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let m = random_matrix(&mut rng, 4, 4, 0.4);
            let opts = SearchOptions::default();
            let a = search_reduction(&m, &BlockyEnumerator, 1, opts).unwrap();
            let b = search_reduction(&m.negate(), &BlockyEnumerator, 1, opts).unwrap();
            assert_eq!(a.is_some(), b.is_some());
            if let Some(w) = a {
                assert!(verify_witness(&m.negate(), &w.negated()).unwrap());
            }
        }
    }

    #[test]
    fn pair_search_is_gated_and_sound() {
        let ehd31 = gen_ehd(3, 1).unwrap();
        assert!(search_reduction(&ehd31, &BlockyEnumerator, 2, SearchOptions::default()).is_err());

        // the sum of two disjoint identity blocks needs two queries or one
        let m = BitMatrix::from_fn(3, 3, |x, y| x == y || (x, y) == (0, 1));
        let opts = SearchOptions {
            budget: DEFAULT_REDUCTION_BUDGET,
            allow_pairs: true,
        };
        assert!(search_reduction(&m, &BlockyEnumerator, 1, opts).unwrap().is_none());
        let w = search_reduction(&m, &BlockyEnumerator, 2, opts).unwrap().unwrap();
        assert!(verify_witness(&m, &w).unwrap());

        let small = SearchOptions {
            budget: 5,
            allow_pairs: true,
        };
        assert!(search_reduction(&m, &BlockyEnumerator, 2, small)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn witness_text_round_trip() {
        let eq2 = gen_equality(2).unwrap();
        let w = ReductionWitness::new(vec![eq2.clone(), eq2.negate()], vec![false, true, true, false]).unwrap();
        let text = w.to_string();
        assert!(text.starts_with("witness 2 0110\n"));
        let back: ReductionWitness = text.parse().unwrap();
        assert_eq!(back, w);
        let plain = ReductionWitness::new(vec![BitMatrix::zeros(2, 3)], vec![true, false]).unwrap();
        assert_eq!(plain.to_string().parse::<ReductionWitness>().unwrap(), plain);
        let labeled = ReductionWitness::new(vec![gen_ehd(2, 1).unwrap(); 2], vec![true; 4]).unwrap();
        assert_eq!(labeled.to_string().parse::<ReductionWitness>().unwrap(), labeled);
        let constant = ReductionWitness::new(vec![], vec![true]).unwrap();
        assert_eq!(constant.to_string().parse::<ReductionWitness>().unwrap(), constant);
        assert!("witness 1 01\n".parse::<ReductionWitness>().is_err());
        assert!("witness 1 0\n1 1\n1\n".parse::<ReductionWitness>().is_err());
        assert!("witness 0 1\nextra\n".parse::<ReductionWitness>().is_err());
    }

    #[test]
    fn witness_verification() {
        let eq2 = gen_equality(2).unwrap();
        let w = ReductionWitness::new(vec![eq2.clone()], vec![false, true]).unwrap();
        assert!(verify_witness(&eq2, &w).unwrap());
        let mut bad = w.clone();
        bad.f[1] = false;
        assert!(!verify_witness(&eq2, &bad).unwrap());
        let constant = ReductionWitness::new(vec![], vec![true]).unwrap();
        assert!(!verify_witness(&eq2, &constant).unwrap());
        let wrong_shape = ReductionWitness::new(vec![BitMatrix::zeros(2, 2)], vec![false, true]).unwrap();
        assert!(matches!(verify_witness(&eq2, &wrong_shape), Err(Error::Shape(_))));
        assert!(ReductionWitness::new(vec![eq2], vec![true]).is_err());
    }
}
