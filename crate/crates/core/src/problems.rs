//! Generators for the problem families and the explicit constructions.
//!
//! Labeled generators index rows and columns by `{0,1}^n` in lexicographic
//! order, so row `i` carries the `n`-bit binary representation of `i`.

use crate::bits::{cube, BitString};
use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, PartialMatrix};

/// Largest side length any generator will materialize.
pub const MAX_SIDE: usize = 1 << 14;
/// Largest string dimension for the cube-indexed families.
pub const MAX_DIM: usize = 14;

/// A problem family together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemSpec {
    Equality { n: usize },
    GreaterThan { t: usize },
    ExactHamming { n: usize, k: usize },
    ThresholdHamming { n: usize, k: usize },
    IntegerInnerProduct { d: usize, n: usize },
    ShatteredTwoTally { k: usize },
    Ehd2Gadget,
}

impl ProblemSpec {
    /// Builds the matrix; total families come back with no `*` entries.
    pub fn build(&self) -> Result<PartialMatrix> {
        Ok(match *self {
            ProblemSpec::Equality { n } => PartialMatrix::from(&gen_equality(n)?),
            ProblemSpec::GreaterThan { t } => PartialMatrix::from(&gen_gt(t)?),
            ProblemSpec::ExactHamming { n, k } => PartialMatrix::from(&gen_ehd(n, k)?),
            ProblemSpec::ThresholdHamming { n, k } => PartialMatrix::from(&gen_thd(n, k)?),
            ProblemSpec::IntegerInnerProduct { d, n } => PartialMatrix::from(&gen_iip(d, n)?),
            ProblemSpec::ShatteredTwoTally { k } => gen_shattered_two_tally(k)?.matrix,
            ProblemSpec::Ehd2Gadget => gen_ehd2_gadget().matrix,
        })
    }
}

fn check_cube(n: usize, k: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::Parameter(format!("n = {n} exceeds {MAX_DIM}")));
    }
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

fn cube_matrix(n: usize, f: impl Fn(usize) -> bool) -> BitMatrix {
    let labels = cube(n);
    BitMatrix::from_labels(labels.clone(), labels, |x, y| f(x.distance(y))).expect("cube labels share one dimension")
}

/// Equality on `{0,1}^n`.
pub fn gen_equality(n: usize) -> Result<BitMatrix> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    check_cube(n, 0)?;
    Ok(cube_matrix(n, |dist| dist == 0))
}

/// `t x t` Greater-Than: entry `(i, j)` is 1 iff `i <= j`.
pub fn gen_gt(t: usize) -> Result<BitMatrix> {
    if t == 0 || t > MAX_SIDE {
        return Err(Error::Parameter(format!("t = {t} outside 1..={MAX_SIDE}")));
    }
    Ok(BitMatrix::from_fn(t, t, |i, j| i <= j))
}

/// Exact Hamming distance: 1 iff `dist(x, y) = k`.
pub fn gen_ehd(n: usize, k: usize) -> Result<BitMatrix> {
    check_cube(n, k)?;
    Ok(cube_matrix(n, |dist| dist == k))
}

/// Threshold Hamming distance: 1 iff `dist(x, y) <= k`.
pub fn gen_thd(n: usize, k: usize) -> Result<BitMatrix> {
    check_cube(n, k)?;
    Ok(cube_matrix(n, |dist| dist <= k))
}

/// Points of `[-2^(n-1), 2^(n-1)]^d` in lexicographic order, both endpoints
/// included; these index the rows and columns of [`gen_iip`].
pub fn iip_points(d: usize, n: usize) -> Result<Vec<Vec<i64>>> {
    if d == 0 || n == 0 || n > 20 {
        return Err(Error::Parameter(format!(
            "d = {d}, n = {n}: need d >= 1 and 1 <= n <= 20"
        )));
    }
    let per_axis = (1usize << n) + 1;
    let side = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(per_axis).filter(|&s| s <= MAX_SIDE));
    let side = side.ok_or_else(|| Error::Parameter(format!("(2^{n} + 1)^{d} exceeds the side limit {MAX_SIDE}")))?;
    let low = -(1i64 << (n - 1));
    Ok((0..side)
        .map(|mut idx| {
            let mut v = vec![0i64; d];
            for coord in v.iter_mut().rev() {
                *coord = low + (idx % per_axis) as i64;
                idx /= per_axis;
            }
            v
        })
        .collect())
}

/// Index of `point` among [`iip_points`]`(d, n)`.
pub fn iip_index(d: usize, n: usize, point: &[i64]) -> Option<usize> {
    if point.len() != d || n == 0 || n > 20 {
        return None;
    }
    let per_axis = (1i64 << n) + 1;
    let low = -(1i64 << (n - 1));
    point.iter().try_fold(0usize, |acc, &x| {
        let off = x - low;
        (0..per_axis)
            .contains(&off)
            .then(|| acc * per_axis as usize + off as usize)
    })
}

/// Integer inner product: 0 iff `<x, y> = 0`.
pub fn gen_iip(d: usize, n: usize) -> Result<BitMatrix> {
    let pts = iip_points(d, n)?;
    Ok(BitMatrix::from_fn(pts.len(), pts.len(), |r, c| {
        pts[r].iter().zip(&pts[c]).map(|(a, b)| a * b).sum::<i64>() != 0
    }))
}

/// A `2^k x k` labeled submatrix of `EHD_{k-1}^{2k+1}` whose columns are
/// shattered.
#[derive(Clone, Debug)]
pub struct ShatteredTwoTally {
    pub matrix: PartialMatrix,
    /// String dimension of the labels.
    pub n: usize,
}

/// Rows are indexed by subsets `S` of `{0..k}` in bitmask order; row `S`
/// carries `x^S` (bits of `S` set, plus the last `k - |S|` bits) and column
/// `i` carries the standard basis vector `e_i`.
pub fn gen_shattered_two_tally(k: usize) -> Result<ShatteredTwoTally> {
    if !(1..=6).contains(&k) {
        return Err(Error::Parameter(format!("k = {k} outside 1..=6")));
    }
    let n = 2 * k + 1;
    let rows: Vec<BitString> = (0..1usize << k)
        .map(|mask| {
            let size = mask.count_ones() as usize;
            let mut x = BitString::zeros(n);
            (0..k).filter(|i| mask >> i & 1 == 1).for_each(|i| x.set(i, true));
            (n - (k - size)..n).for_each(|i| x.set(i, true));
            x
        })
        .collect();
    let cols: Vec<BitString> = (0..k).map(|i| BitString::from_positions(n, &[i])).collect();
    let matrix = PartialMatrix::from_labels(rows, cols, |x, y| Some(x.distance(y) + 1 == k))?;
    Ok(ShatteredTwoTally { matrix, n })
}

/// The 7-bit gadget over weight-2 strings whose 1-entries sit at distance 2
/// and 0-entries at distance 4.
#[derive(Clone, Debug)]
pub struct Ehd2Gadget {
    pub x: Vec<BitString>,
    pub y0: Vec<BitString>,
    pub y1: Vec<BitString>,
    /// Rows `x` then the added rows; columns `y0`, `y1`, then the added
    /// columns. Entries: 1 at distance 2, 0 at distance 4, `*` otherwise.
    pub matrix: PartialMatrix,
}

fn strs(list: &[&str]) -> Vec<BitString> {
    list.iter().map(|s| s.parse().expect("literal bitstring")).collect()
}

/// Lexicographically smallest weight-2 string at distance 2 from `a` and
/// distance 4 from `b`.
pub fn gadget_delta(a: &BitString, b: &BitString) -> Option<BitString> {
    let mut weight_two: Vec<BitString> = cube(a.len()).into_iter().filter(|s| s.count_ones() == 2).collect();
    weight_two.sort();
    weight_two
        .into_iter()
        .find(|d| a.distance(d) == 2 && b.distance(d) == 4)
}

fn push_unique(into: &mut Vec<BitString>, s: BitString) {
    if !into.contains(&s) {
        into.push(s);
    }
}

pub fn gen_ehd2_gadget() -> Ehd2Gadget {
    let x = strs(&["0011000", "1100000"]);
    let y0 = strs(&["0000011", "0000101", "0000110"]);
    let y1 = strs(&["1010000", "1001000", "0101000"]);
    let y: Vec<BitString> = y0.iter().chain(&y1).cloned().collect();

    let delta = |a: &BitString, b: &BitString| gadget_delta(a, b).unwrap_or_else(|| panic!("no delta for ({a}, {b})"));
    let mut rows = x.clone();
    for a in &y {
        for b in y.iter().filter(|b| *b != a) {
            push_unique(&mut rows, delta(a, b));
        }
    }
    let mut cols = y.clone();
    for a in &x {
        for b in x.iter().filter(|b| *b != a) {
            push_unique(&mut cols, delta(a, b));
        }
    }
    let matrix = PartialMatrix::from_labels(rows, cols, |r, c| match r.distance(c) {
        2 => Some(true),
        4 => Some(false),
        _ => None,
    })
    .expect("all gadget strings have 7 bits");
    Ehd2Gadget { x, y0, y1, matrix }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn equality_examples() {
        let e1 = gen_equality(1).unwrap();
        assert_eq!(e1, "2 2 1\n10\n01\n0\n1\n0\n1\n".parse().unwrap());
        let e2 = gen_equality(2).unwrap();
        assert_eq!(e2.get_by_labels(&bs("01"), &bs("01")), Some(true));
        assert_eq!(e2.get_by_labels(&bs("01"), &bs("10")), Some(false));
        assert!(gen_equality(0).is_err());
        assert!(gen_equality(15).is_err());
    }

    #[test]
    fn gt_examples() {
        let g2 = gen_gt(2).unwrap();
        assert_eq!(g2.to_string(), "2 2\n11\n01\n");
        let g8 = gen_gt(8).unwrap();
        assert!(g8.get(3, 5));
        assert!(!g8.get(7, 2));
        assert!(!g8.is_symmetric());
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(gen_ehd(2, 1).unwrap().get_by_labels(&bs("00"), &bs("01")), Some(true));
        assert_eq!(
            gen_ehd(7, 2).unwrap().get_by_labels(&bs("0011000"), &bs("1010000")),
            Some(true)
        );
        assert_eq!(
            gen_thd(3, 1).unwrap().get_by_labels(&bs("000"), &bs("011")),
            Some(false)
        );
        assert!(gen_ehd(3, 4).is_err());
    }

    #[test]
    fn thd_is_or_of_ehd() {
        for n in 0..=8 {
            for k in 0..=n {
                let thd = gen_thd(n, k).unwrap();
                let ehds: Vec<BitMatrix> = (0..=k).map(|t| gen_ehd(n, t).unwrap()).collect();
                for r in 0..thd.rows() {
                    for c in 0..thd.cols() {
                        assert_eq!(thd.get(r, c), ehds.iter().any(|e| e.get(r, c)));
                    }
                }
                assert!(gen_ehd(n, k).unwrap().is_symmetric());
            }
        }
    }

    #[test]
    fn iip_examples() {
        let one = gen_iip(1, 1).unwrap();
        let at = |d, n, p: &[i64]| iip_index(d, n, p).unwrap();
        assert_eq!(one.rows(), 3);
        assert!(!one.get(at(1, 1, &[0]), at(1, 1, &[1])));
        let two = gen_iip(2, 1).unwrap();
        assert!(!two.get(at(2, 1, &[1, 1]), at(2, 1, &[1, -1])));
        assert!(two.get(at(2, 1, &[1, 0]), at(2, 1, &[1, 0])));
        assert_eq!(gen_iip(2, 2).unwrap().rows(), 25);
        assert!(gen_iip(5, 3).is_err());
        let pts = iip_points(2, 2).unwrap();
        assert_eq!(pts[0], vec![-2, -2]);
        assert_eq!(pts[24], vec![2, 2]);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(iip_index(2, 2, p), Some(i));
        }
    }

    #[test]
    fn shattered_distances() {
        for k in 1..=6 {
            let s = gen_shattered_two_tally(k).unwrap();
            assert_eq!(s.n, 2 * k + 1);
            let labels = s.matrix.labels().unwrap();
            for (mask, x) in labels.rows().iter().enumerate() {
                for (i, y) in labels.cols().iter().enumerate() {
                    let in_s = mask >> i & 1 == 1;
                    assert_eq!(x.distance(y), if in_s { k - 1 } else { k + 1 });
                    assert_eq!(s.matrix.get(mask, i), Some(in_s));
                }
            }
        }
        let k1 = gen_shattered_two_tally(1).unwrap().matrix;
        assert_eq!((k1.get(0, 0), k1.get(1, 0)), (Some(false), Some(true)));
    }

    #[test]
    fn gadget_structure() {
        let g = gen_ehd2_gadget();
        let m = &g.matrix;
        let labels = m.labels().unwrap();
        let row = |s: &str| labels.rows().iter().position(|l| *l == bs(s)).unwrap();
        let col = |s: &str| labels.cols().iter().position(|l| *l == bs(s)).unwrap();
        assert_eq!(m.get(row("1100000"), col("0000011")), Some(false));
        assert_eq!(m.get(row("0011000"), col("1010000")), Some(true));
        for i in 0..m.rows() {
            for j in 0..i {
                assert_ne!(m.row_cells(i), m.row_cells(j), "rows {i} and {j}");
            }
        }
        for i in 0..m.cols() {
            for j in 0..i {
                assert_ne!(m.col_cells(i), m.col_cells(j), "cols {i} and {j}");
            }
        }
        let ehd = gen_ehd(7, 2).unwrap();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if let Some(v) = m.get(r, c) {
                    assert_eq!(ehd.get_by_labels(&labels.rows()[r], &labels.cols()[c]), Some(v));
                }
            }
        }
        for x in &g.x {
            for y in &g.y1 {
                assert_eq!(x.distance(y), 2);
            }
            for y in &g.y0 {
                assert_eq!(x.distance(y), 4);
            }
        }
    }

    #[test]
    fn delta_exists_for_every_weight_two_pair() {
        let w2: Vec<BitString> = cube(7).into_iter().filter(|s| s.count_ones() == 2).collect();
        for a in &w2 {
            for b in w2.iter().filter(|b| *b != a) {
                let d = gadget_delta(a, b).unwrap();
                assert_eq!((d.count_ones(), a.distance(&d), b.distance(&d)), (2, 2, 4));
            }
        }
    }

    #[test]
    fn spec_builds_every_family() {
        let specs = [
            ProblemSpec::Equality { n: 2 },
            ProblemSpec::GreaterThan { t: 3 },
            ProblemSpec::ExactHamming { n: 2, k: 1 },
            ProblemSpec::ThresholdHamming { n: 2, k: 1 },
            ProblemSpec::IntegerInnerProduct { d: 1, n: 1 },
            ProblemSpec::ShatteredTwoTally { k: 2 },
            ProblemSpec::Ehd2Gadget,
        ];
        let sides: Vec<(usize, usize)> = specs
            .iter()
            .map(|s| s.build().map(|m| (m.rows(), m.cols())).unwrap())
            .collect();
        assert_eq!(sides[..6], [(4, 4), (3, 3), (4, 4), (4, 4), (3, 3), (4, 2)]);
    }
}
