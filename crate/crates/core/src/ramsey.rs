//! Homogeneous sets for colorings of small subsets, and the extraction of
//! shuffle-invariant queries through coordinate embeddings.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::bits::{cube, BitString};
use crate::domino::{is_shuffle_invariant, Domino, DominoSet};
use crate::error::{Error, ParseError, Result};
use crate::matrix::BitMatrix;

/// Default node budget for [`find_homogeneous`].
pub const DEFAULT_RAMSEY_BUDGET: u64 = 10_000_000;

/// Colors of all subsets of `0..n` with `1..=alpha` elements. The empty set
/// is left implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetColoring {
    n: usize,
    alpha: usize,
    colors: HashMap<u64, u32>,
    num_colors: u32,
}

fn mask(subset: &[usize]) -> u64 {
    subset.iter().fold(0, |m, &i| m | 1 << i)
}

/// Calls `f` on every `size`-subset of `items` in lexicographic order.
fn for_each_subset(items: &[usize], size: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(items: &[usize], size: usize, from: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in from..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, size, i + 1, cur, f);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::with_capacity(size), f);
}

impl SubsetColoring {
    /// Colors every subset by `f`; distinct values become dense color ids in
    /// order of first appearance (by size, then lexicographically).
    pub fn from_fn<C: Eq + Hash>(n: usize, alpha: usize, mut f: impl FnMut(&[usize]) -> C) -> Result<Self> {
        Self::try_from_fn(n, alpha, |s| Ok(f(s)))
    }

    pub fn try_from_fn<C: Eq + Hash>(n: usize, alpha: usize, mut f: impl FnMut(&[usize]) -> Result<C>) -> Result<Self> {
        if n > 64 {
            return Err(Error::Parameter(format!("ground set of size {n} exceeds 64")));
        }
        if alpha == 0 || alpha > n {
            return Err(Error::Parameter(format!("arity {alpha} must be in 1..={n}")));
        }
        let ground: Vec<usize> = (0..n).collect();
        let mut ids: HashMap<C, u32> = HashMap::new();
        let mut colors = HashMap::new();
        let mut err = None;
        for size in 1..=alpha {
            for_each_subset(&ground, size, &mut |s| {
                if err.is_some() {
                    return;
                }
                match f(s) {
                    Ok(c) => {
                        let next = ids.len() as u32;
                        let id = *ids.entry(c).or_insert(next);
                        colors.insert(mask(s), id);
                    }
                    Err(e) => err = Some(e),
                }
            });
        }
        if let Some(e) = err {
            return Err(e);
        }
        Ok(Self {
            n,
            alpha,
            colors,
            num_colors: ids.len() as u32,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Number of distinct colors used.
    pub fn num_colors(&self) -> usize {
        self.num_colors as usize
    }

    /// Color of a subset given by its elements.
    pub fn color(&self, subset: &[usize]) -> Option<u32> {
        self.colors.get(&mask(subset)).copied()
    }

    fn color_mask(&self, m: u64) -> u32 {
        self.colors[&m]
    }
}

/// File format: a header `N alpha`, then one line per subset holding its
/// 0-based elements followed by a color token. Blank lines and lines
/// starting with `#` are skipped.
impl FromStr for SubsetColoring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(ParseError::Truncated { expected: 1 })?;
        let bad_header = |reason: &str| ParseError::BadHeader {
            line: hline,
            reason: reason.into(),
        };
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad_header("expected two integers"))?;
        let [n, alpha] = nums[..] else {
            return Err(bad_header("expected `N alpha`").into());
        };
        if n > 64 || alpha == 0 || alpha > n {
            return Err(bad_header("need 1 <= alpha <= N <= 64").into());
        }
        let mut given: HashMap<u64, String> = HashMap::new();
        for (line, text) in lines {
            let invalid = |reason: String| ParseError::Invalid { line, reason };
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let (color, elems) = tokens.split_last().expect("non-empty line");
            let mut subset = Vec::with_capacity(elems.len());
            for t in elems {
                let e: usize = t.parse().map_err(|_| invalid(format!("bad element {t:?}")))?;
                if e >= n {
                    return Err(invalid(format!("element {e} outside 0..{n}")).into());
                }
                subset.push(e);
            }
            subset.sort_unstable();
            if subset.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("repeated element".into()).into());
            }
            if subset.is_empty() || subset.len() > alpha {
                return Err(invalid(format!("subset size must be in 1..={alpha}")).into());
            }
            if let Some(old) = given.insert(mask(&subset), color.to_string()) {
                if old != *color {
                    return Err(invalid("subset colored twice".into()).into());
                }
            }
        }
        let last = s.lines().count();
        Self::try_from_fn(n, alpha, |sub| {
            given.get(&mask(sub)).cloned().ok_or_else(|| {
                ParseError::Invalid {
                    line: last,
                    reason: format!("subset {sub:?} has no color"),
                }
                .into()
            })
        })
    }
}

impl fmt::Display for SubsetColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.alpha)?;
        let ground: Vec<usize> = (0..self.n).collect();
        let mut out = Ok(());
        for size in 1..=self.alpha {
            for_each_subset(&ground, size, &mut |s| {
                if out.is_ok() {
                    let elems: Vec<String> = s.iter().map(|e| e.to_string()).collect();
                    out = writeln!(f, "{} {}", elems.join(" "), self.color_mask(mask(s)));
                }
            });
        }
        out
    }
}

/// Whether every subset of `t` of each size `1..=alpha` has one color per
/// size.
pub fn is_homogeneous(coloring: &SubsetColoring, t: &[usize]) -> bool {
    (1..=coloring.alpha.min(t.len())).all(|size| {
        let mut first = None;
        let mut ok = true;
        for_each_subset(t, size, &mut |s| {
            let c = coloring.color(s);
            ok &= *first.get_or_insert(c) == c;
        });
        ok
    })
}

struct Search<'a> {
    coloring: &'a SubsetColoring,
    accept: &'a mut dyn FnMut(&[usize]) -> bool,
    sigma: usize,
    budget: u64,
    spent: u64,
    level: Vec<Option<u32>>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn extend(&mut self, from: usize) -> Result<bool> {
        if self.chosen.len() == self.sigma {
            return Ok((self.accept)(&self.chosen));
        }
        let need = self.sigma - self.chosen.len();
        for e in from..=self.coloring.n - need {
            self.spent += 1;
            if self.spent > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            let saved = self.level.clone();
            if self.admits(e) {
                self.chosen.push(e);
                if self.extend(e + 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
            self.level = saved;
        }
        Ok(false)
    }

    // colors of the new subsets containing `e` must match their level
    fn admits(&mut self, e: usize) -> bool {
        let top = self.coloring.alpha.min(self.chosen.len() + 1);
        for size in 1..=top {
            let mut ok = true;
            let (coloring, level) = (self.coloring, &mut self.level);
            for_each_subset(&self.chosen, size - 1, &mut |s| {
                if ok {
                    let c = coloring.color_mask(mask(s) | 1 << e);
                    ok = *level[size].get_or_insert(c) == c;
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Backtracking search for a `sigma`-subset on which the coloring is
/// constant at every size. Elements are tried in increasing order, so the
/// lexicographically first such set is returned.
pub fn find_homogeneous(coloring: &SubsetColoring, sigma: usize, budget: u64) -> Result<Option<Vec<usize>>> {
    find_homogeneous_with(coloring, sigma, budget, &mut |_| true)
}

/// Like [`find_homogeneous`], but skips homogeneous sets that `accept`
/// rejects.
pub fn find_homogeneous_with(
    coloring: &SubsetColoring,
    sigma: usize,
    budget: u64,
    accept: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<Option<Vec<usize>>> {
    if sigma < coloring.alpha {
        return Err(Error::Parameter(format!(
            "target size {sigma} is below the arity {}",
            coloring.alpha
        )));
    }
    if sigma > coloring.n {
        return Ok(None);
    }
    let mut search = Search {
        coloring,
        accept,
        sigma,
        budget,
        spent: 0,
        level: vec![None; coloring.alpha + 1],
        chosen: Vec::with_capacity(sigma),
    };
    Ok(search.extend(0)?.then_some(search.chosen))
}

/// The map writing `x` into the coordinates `t` (in order) of a length-`n`
/// string whose other coordinates are `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingPhi {
    n: usize,
    t: Vec<usize>,
    a: bool,
}

impl EmbeddingPhi {
    pub fn new(n: usize, t: Vec<usize>, a: bool) -> Result<Self> {
        if t.windows(2).any(|w| w[0] >= w[1]) || t.last().is_some_and(|&l| l >= n) {
            return Err(Error::Parameter(format!("{t:?} is not an increasing subset of 0..{n}")));
        }
        Ok(Self { n, t, a })
    }

    pub fn target_dim(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn fill(&self) -> bool {
        self.a
    }
}

pub fn embed_phi(x: &BitString, phi: &EmbeddingPhi) -> Result<BitString> {
    if x.len() != phi.t.len() {
        return Err(Error::LengthMismatch {
            expected: phi.t.len(),
            found: x.len(),
        });
    }
    let mut out = if phi.a {
        BitString::ones(phi.n)
    } else {
        BitString::zeros(phi.n)
    };
    for (i, &p) in phi.t.iter().enumerate() {
        out.set(p, x.get(i));
    }
    Ok(out)
}

/// Largest source dimension accepted by [`extract_invariant_queries`].
pub const MAX_EXTRACT_N: usize = 3;
/// Largest query label dimension accepted by [`extract_invariant_queries`].
pub const MAX_EXTRACT_DIM: usize = 12;

/// Outcome of [`extract_invariant_queries`].
#[derive(Clone, Debug)]
pub struct Extraction {
    pub phi: EmbeddingPhi,
    /// `Q_i(x, y) = Q'_i(phi(x), phi(y))` over `{0,1}^n`, labeled.
    pub restricted: Vec<BitMatrix>,
    /// Number of distinct subset colors that occurred.
    pub colors: usize,
    /// Homogeneous sets passed over because their restriction was not
    /// invariant.
    pub rejected: usize,
}

/// Dominoes other than `aa`, in the order used to build subset colors.
pub fn other_dominoes(a: bool) -> [Domino; 3] {
    [Domino::new(!a, !a), Domino::new(true, false), Domino::new(false, true)]
}

fn label_index(labels: &[BitString]) -> HashMap<&BitString, usize> {
    labels.iter().enumerate().map(|(i, l)| (l, i)).collect()
}

/// Colors each subset `S` of at most `n` coordinates by the query answers on
/// every pair whose non-`aa` dominoes sit exactly on `S`, finds a
/// homogeneous `n`-set `T` and restricts the queries through `phi_T`.
///
/// Each input query must be `delta`-shuffle invariant. Homogeneous sets are
/// tried in lexicographic order and the first one whose restricted queries
/// are invariant for `delta` plus `aa` is returned. When `ehd` holds a truth
/// table `f` and a threshold `k`, `f` over the restricted queries is also
/// checked against exact Hamming distance `k` on `{0,1}^n`.
pub fn extract_invariant_queries(
    queries: &[BitMatrix],
    n: usize,
    delta: DominoSet,
    a: bool,
    ehd: Option<(&[bool], usize)>,
    budget: u64,
) -> Result<Extraction> {
    let first = queries
        .first()
        .ok_or_else(|| Error::Parameter("no queries given".into()))?;
    let big_n = first.require_labels()?.dim();
    if n == 0 || n > MAX_EXTRACT_N || big_n > MAX_EXTRACT_DIM || n > big_n {
        return Err(Error::Parameter(format!(
            "need 1 <= n <= {MAX_EXTRACT_N} and n <= N <= {MAX_EXTRACT_DIM}, got n = {n}, N = {big_n}"
        )));
    }
    let mut lookups = Vec::with_capacity(queries.len());
    for (i, q) in queries.iter().enumerate() {
        let labels = q.require_labels()?;
        if labels.dim() != big_n {
            return Err(Error::LengthMismatch {
                expected: big_n,
                found: labels.dim(),
            });
        }
        if !is_shuffle_invariant(q, delta)?.is_invariant() {
            return Err(Error::Precondition(format!(
                "query {i} is not {delta}-shuffle invariant"
            )));
        }
        lookups.push((label_index(labels.rows()), label_index(labels.cols())));
    }
    let lookup = |i: usize, u: &BitString, v: &BitString| -> Result<bool> {
        let (rows, cols) = &lookups[i];
        match (rows.get(u), cols.get(v)) {
            (Some(&r), Some(&c)) => Ok(queries[i].get(r, c)),
            _ => Err(Error::Parameter(format!("query {i} has no entry for ({u}, {v})"))),
        }
    };

    let dominoes = other_dominoes(a);
    let fill = if a {
        BitString::ones(big_n)
    } else {
        BitString::zeros(big_n)
    };
    let coloring = SubsetColoring::try_from_fn(big_n, n, |s| {
        let mut col = Vec::with_capacity(queries.len() * 3usize.pow(s.len() as u32));
        // d runs over D^s lexicographically, first coordinate most significant
        for code in 0..3usize.pow(s.len() as u32) {
            let (mut u, mut v) = (fill.clone(), fill.clone());
            let mut rest = code;
            for &p in s.iter().rev() {
                let d = dominoes[rest % 3];
                rest /= 3;
                u.set(p, d.top);
                v.set(p, d.bottom);
            }
            for i in 0..queries.len() {
                col.push(lookup(i, &u, &v)?);
            }
        }
        Ok(col)
    })?;
    let small = cube(n);
    let widened = delta.with(Domino::new(a, a));
    let restrict = |t: &[usize]| -> Result<(EmbeddingPhi, Vec<BitMatrix>)> {
        let phi = EmbeddingPhi::new(big_n, t.to_vec(), a)?;
        let images: Vec<BitString> = small.iter().map(|x| embed_phi(x, &phi)).collect::<Result<_>>()?;
        let mut restricted = Vec::with_capacity(queries.len());
        for i in 0..queries.len() {
            let mut err = None;
            let m = BitMatrix::from_labels(small.clone(), small.clone(), |x, y| {
                let (xi, yi) = (x.to_uint() as usize, y.to_uint() as usize);
                lookup(i, &images[xi], &images[yi]).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    false
                })
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            restricted.push(m);
        }
        Ok((phi, restricted))
    };
    // homogeneity alone does not make the restriction invariant when `delta`
    // is non-empty and `t` has gaps, so candidates are also checked directly
    let mut rejected = 0;
    let mut failure = None;
    let t = find_homogeneous_with(&coloring, n, budget, &mut |t| {
        let verdict = restrict(t).and_then(|(_, qs)| {
            qs.iter()
                .try_fold(true, |ok, q| Ok(ok && is_shuffle_invariant(q, widened)?.is_invariant()))
        });
        match verdict {
            Ok(true) => true,
            Ok(false) => {
                rejected += 1;
                false
            }
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let t = t.ok_or(Error::NoHomogeneousSet { size: n, ground: big_n })?;
    let (phi, restricted) = restrict(&t)?;

    if let Some((f, k)) = ehd {
        if f.len() != 1 << queries.len() {
            return Err(Error::LengthMismatch {
                expected: 1 << queries.len(),
                found: f.len(),
            });
        }
        for (xi, x) in small.iter().enumerate() {
            for (yi, y) in small.iter().enumerate() {
                let idx = restricted
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, q)| acc | (q.get(xi, yi) as usize) << i);
                if f[idx] != (x.distance(y) == k) {
                    return Err(Error::Verification(format!(
                        "f disagrees with distance {k} at ({x}, {y})"
                    )));
                }
            }
        }
    }
    Ok(Extraction {
        phi,
        restricted,
        colors: coloring.num_colors(),
        rejected,
    })
}
