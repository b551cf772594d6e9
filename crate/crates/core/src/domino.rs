//! Dominoes, tallies and types of string pairs; shuffle invariance and the
//! two-tally condition.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, PartialMatrix};

/// The pair `(x_i, y_i)` at one coordinate, written `ab`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domino {
    pub top: bool,
    pub bottom: bool,
}

impl Domino {
    pub const ALL: [Domino; 4] = [
        Domino::new(false, false),
        Domino::new(false, true),
        Domino::new(true, false),
        Domino::new(true, true),
    ];

    pub const fn new(top: bool, bottom: bool) -> Self {
        Self { top, bottom }
    }

    /// `00 -> 0`, `01 -> 1`, `10 -> 2`, `11 -> 3`.
    #[inline]
    pub const fn index(self) -> usize {
        (self.top as usize) << 1 | self.bottom as usize
    }
}

impl fmt::Display for Domino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.top as u8, self.bottom as u8)
    }
}

/// A subset of the four dominoes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DominoSet(u8);

impl DominoSet {
    pub const EMPTY: DominoSet = DominoSet(0);
    pub const FULL: DominoSet = DominoSet(0b1111);

    pub fn of(dominoes: &[Domino]) -> Self {
        Self(dominoes.iter().fold(0, |m, d| m | 1 << d.index()))
    }

    #[inline]
    pub fn contains(self, d: Domino) -> bool {
        self.0 >> d.index() & 1 == 1
    }

    pub fn complement(self) -> Self {
        Self(!self.0 & 0b1111)
    }

    pub fn with(self, d: Domino) -> Self {
        Self(self.0 | 1 << d.index())
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Domino> {
        Domino::ALL.into_iter().filter(move |&d| self.contains(d))
    }

    /// All sixteen subsets.
    pub fn all_subsets() -> impl Iterator<Item = Self> {
        (0u8..16).map(DominoSet)
    }
}

impl fmt::Display for DominoSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for DominoSet {
    type Err = Error;

    /// Accepts `all`, `none`, or a comma-separated list such as `01,10`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        match s {
            "all" => return Ok(Self::FULL),
            "none" | "" => return Ok(Self::EMPTY),
            _ => {}
        }
        let mut set = Self::EMPTY;
        for part in s.split(',') {
            let d = match part.trim() {
                "00" => Domino::new(false, false),
                "01" => Domino::new(false, true),
                "10" => Domino::new(true, false),
                "11" => Domino::new(true, true),
                other => return Err(Error::Parameter(format!("not a domino: {other:?}"))),
            };
            set = set.with(d);
        }
        Ok(set)
    }
}

/// Counts of `00`, `01`, `10`, `11` in that order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Tally(pub [usize; 4]);

impl Tally {
    pub fn of(x: &BitString, y: &BitString) -> Self {
        let ones_x = x.count_ones();
        let ones_y = y.count_ones();
        let dist = x.distance(y);
        // |x & y| = (|x| + |y| - dist) / 2
        let both = (ones_x + ones_y - dist) / 2;
        let only_x = ones_x - both;
        let only_y = ones_y - both;
        Self([x.len() - both - only_x - only_y, only_y, only_x, both])
    }

    pub fn count(&self, d: Domino) -> usize {
        self.0[d.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[00={a}, 01={b}, 10={c}, 11={d}]")
    }
}

/// Signature restricted to a domino set, plus the full tally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeltaType {
    pub signature: Vec<Domino>,
    pub tally: Tally,
}

impl fmt::Display for DeltaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig: Vec<String> = self.signature.iter().map(|d| d.to_string()).collect();
        write!(f, "<({}), {}>", sig.join(", "), self.tally)
    }
}

pub fn dominoes<'a>(x: &'a BitString, y: &'a BitString) -> impl Iterator<Item = Domino> + 'a {
    (0..x.len()).map(move |i| Domino::new(x.get(i), y.get(i)))
}

/// The `delta`-type of `(x, y)`.
pub fn delta_type(x: &BitString, y: &BitString, delta: DominoSet) -> Result<DeltaType> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let mut tally = Tally::default();
    let mut signature = Vec::new();
    for d in dominoes(x, y) {
        tally.0[d.index()] += 1;
        if delta.contains(d) {
            signature.push(d);
        }
    }
    Ok(DeltaType { signature, tally })
}

/// Largest label dimension accepted by [`is_shuffle_invariant`].
pub const MAX_INVARIANCE_DIM: usize = 16;

/// Packs the type of `(x, y)` over `kept` into one word: two bits per kept
/// domino, then four 5-bit counts.
fn packed_type(x: &BitString, y: &BitString, kept: DominoSet) -> u64 {
    let mut sig = 0u64;
    let mut tally = [0u64; 4];
    for d in dominoes(x, y) {
        tally[d.index()] += 1;
        if kept.contains(d) {
            sig = sig << 2 | d.index() as u64;
        }
    }
    tally.iter().fold(sig, |acc, &t| acc << 5 | t)
}

/// Outcome of a shuffle-invariance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShuffleVerdict {
    Invariant,
    /// `(x, y)` and `(u, v)` share the complement type but `Q` differs.
    Violation {
        x: BitString,
        y: BitString,
        u: BitString,
        v: BitString,
    },
}

impl ShuffleVerdict {
    pub fn is_invariant(&self) -> bool {
        matches!(self, ShuffleVerdict::Invariant)
    }
}

/// Whether `q` is `delta`-shuffle invariant over its labeled entries: any two
/// label pairs with the same type over the complement of `delta` must get
/// the same value.
///
/// Pairs are visited in row-major label order; a violation reports the first
/// pair of its type class and the first pair that disagrees with it.
pub fn is_shuffle_invariant(q: &BitMatrix, delta: DominoSet) -> Result<ShuffleVerdict> {
    let labels = q.require_labels()?;
    if labels.dim() > MAX_INVARIANCE_DIM {
        return Err(Error::Parameter(format!(
            "label dimension {} exceeds {MAX_INVARIANCE_DIM}",
            labels.dim()
        )));
    }
    let kept = delta.complement();
    let mut seen: HashMap<u64, (bool, usize, usize)> = HashMap::new();
    for (r, x) in labels.rows().iter().enumerate() {
        for (c, y) in labels.cols().iter().enumerate() {
            let value = q.get(r, c);
            let &mut (first, fr, fc) = seen.entry(packed_type(x, y, kept)).or_insert((value, r, c));
            if first != value {
                return Ok(ShuffleVerdict::Violation {
                    x: labels.rows()[fr].clone(),
                    y: labels.cols()[fc].clone(),
                    u: x.clone(),
                    v: y.clone(),
                });
            }
        }
    }
    Ok(ShuffleVerdict::Invariant)
}

/// First way a labeled partial matrix fails the two-tally conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoTallyViolation {
    /// A non-`*` entry disagrees with `EHD_k` on its labels.
    Disagrees {
        row: usize,
        col: usize,
        value: bool,
        distance: usize,
    },
    /// Two entries with the same value have different tallies.
    TallyMismatch {
        value: bool,
        first: (usize, usize),
        first_tally: Tally,
        other: (usize, usize),
        other_tally: Tally,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTallyReport {
    /// Every non-`*` entry equals `EHD_k` on its labels.
    pub agrees_with_ehd: bool,
    /// All 1-entries share one tally and all 0-entries share one tally.
    pub shared_tallies: bool,
    pub first_violation: Option<TwoTallyViolation>,
}

impl TwoTallyReport {
    pub fn passes(&self) -> bool {
        self.agrees_with_ehd && self.shared_tallies
    }
}

/// Checks both two-tally conditions for `m` against `EHD_k`.
pub fn verify_two_tally(m: &PartialMatrix, k: usize) -> Result<TwoTallyReport> {
    let labels = m.require_labels()?;
    let mut agrees = true;
    let mut shared = true;
    let mut first_violation = None;
    let mut class: [Option<((usize, usize), Tally)>; 2] = [None, None];
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let Some(value) = m.get(r, c) else { continue };
            let (x, y) = (&labels.rows()[r], &labels.cols()[c]);
            let distance = x.distance(y);
            if (distance == k) != value {
                agrees = false;
                first_violation.get_or_insert(TwoTallyViolation::Disagrees {
                    row: r,
                    col: c,
                    value,
                    distance,
                });
            }
            let tally = Tally::of(x, y);
            match &class[value as usize] {
                None => class[value as usize] = Some(((r, c), tally)),
                Some((first, first_tally)) if *first_tally != tally => {
                    shared = false;
                    first_violation.get_or_insert(TwoTallyViolation::TallyMismatch {
                        value,
                        first: *first,
                        first_tally: *first_tally,
                        other: (r, c),
                        other_tally: tally,
                    });
                }
                Some(_) => {}
            }
        }
    }
    Ok(TwoTallyReport {
        agrees_with_ehd: agrees,
        shared_tallies: shared,
        first_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::cube;
    use crate::matrix::Labels;
    use crate::problems::{gen_ehd, gen_ehd2_gadget, gen_gt, gen_shattered_two_tally, gen_thd};
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn set(s: &str) -> DominoSet {
        s.parse().unwrap()
    }

    #[test]
    fn worked_type_example() {
        let t = delta_type(&bs("0110000"), &bs("0101001"), set("01,10")).unwrap();
        assert_eq!(
            t.signature,
            vec![
                Domino::new(true, false),
                Domino::new(false, true),
                Domino::new(false, true)
            ]
        );
        assert_eq!(t.tally, Tally([3, 2, 1, 1]));
        let t = delta_type(&bs("0110000"), &bs("0101001"), DominoSet::EMPTY).unwrap();
        assert!(t.signature.is_empty());
        assert_eq!(t.tally, Tally([3, 2, 1, 1]));
        let t = delta_type(&bs("000"), &bs("000"), set("00")).unwrap();
        assert_eq!(t.signature, vec![Domino::new(false, false); 3]);
        assert_eq!(t.tally, Tally([3, 0, 0, 0]));
        assert!(delta_type(&bs("00"), &bs("000"), DominoSet::FULL).is_err());
    }

    #[test]
    fn domino_set_text() {
        assert_eq!(set("all"), DominoSet::FULL);
        assert_eq!(set("{01,10}").to_string(), "{01,10}");
        assert_eq!(set("none"), DominoSet::EMPTY);
        assert!("02".parse::<DominoSet>().is_err());
    }

    #[test]
    fn tally_matches_counting() {
        for x in cube(4) {
            for y in cube(4) {
                let mut counts = [0; 4];
                dominoes(&x, &y).for_each(|d| counts[d.index()] += 1);
                assert_eq!(Tally::of(&x, &y), Tally(counts));
            }
        }
    }

    #[test]
    fn hamming_families_are_permutation_invariant() {
        for n in 0..=6 {
            for k in 0..=n {
                assert!(is_shuffle_invariant(&gen_ehd(n, k).unwrap(), DominoSet::FULL)
                    .unwrap()
                    .is_invariant());
                assert!(is_shuffle_invariant(&gen_thd(n, k).unwrap(), DominoSet::FULL)
                    .unwrap()
                    .is_invariant());
            }
        }
    }

    #[test]
    fn empty_delta_is_always_invariant() {
        let ls = cube(2);
        let q = BitMatrix::from_labels(ls.clone(), ls, |x, y| x.get(0) && !y.get(1)).unwrap();
        assert!(is_shuffle_invariant(&q, DominoSet::EMPTY).unwrap().is_invariant());
    }

    #[test]
    fn numeric_gt_is_not_invariant() {
        let ls = cube(2);
        let q = gen_gt(4)
            .unwrap()
            .with_labels(Labels::new(2, ls.clone(), ls).unwrap())
            .unwrap();
        match is_shuffle_invariant(&q, DominoSet::FULL).unwrap() {
            ShuffleVerdict::Violation { x, y, u, v } => {
                assert_eq!(Tally::of(&x, &y), Tally::of(&u, &v));
                let gt = |a: &BitString, b: &BitString| a.to_uint() <= b.to_uint();
                assert_ne!(gt(&x, &y), gt(&u, &v));
                assert_eq!([x, y, u, v].map(|s| s.to_string()), ["01", "10", "10", "01"]);
            }
            ShuffleVerdict::Invariant => panic!("GT must not be permutation invariant"),
        }
        assert!(is_shuffle_invariant(&gen_gt(4).unwrap(), DominoSet::FULL).is_err());
    }

    fn random_labeled(n: usize, bits: &[bool]) -> BitMatrix {
        let ls = cube(n);
        let side = ls.len();
        BitMatrix::from_fn(side, side, |r, c| bits[r * side + c])
            .with_labels(Labels::new(n, ls.clone(), ls).unwrap())
            .unwrap()
    }

    /// A query that only sees the type over the complement of `delta`.
    fn invariant_query(n: usize, delta: DominoSet, salt: u64) -> BitMatrix {
        let ls = cube(n);
        BitMatrix::from_labels(ls.clone(), ls, |x, y| {
            let key = packed_type(x, y, delta.complement());
            (key ^ salt).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 63 == 1
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn appending_a_domino(x in proptest::collection::vec(any::<bool>(), 0..10), seed in any::<u64>(), d in 0usize..4, delta in 0u8..16) {
            let y: Vec<bool> = x.iter().enumerate().map(|(i, b)| b ^ ((seed >> i) & 1 == 1)).collect();
            let delta = DominoSet::all_subsets().nth(delta as usize).unwrap();
            let dom = Domino::ALL[d];
            let (bx, by) = (BitString::from_bits(x.clone()), BitString::from_bits(y.clone()));
            let before = delta_type(&bx, &by, delta).unwrap();
            let mut ax = bx.clone();
            ax.push(dom.top);
            let mut ay = by.clone();
            ay.push(dom.bottom);
            let after = delta_type(&ax, &ay, delta).unwrap();
            let mut tally = before.tally;
            tally.0[dom.index()] += 1;
            prop_assert_eq!(after.tally, tally);
            let mut sig = before.signature.clone();
            if delta.contains(dom) {
                sig.push(dom);
            }
            prop_assert_eq!(after.signature, sig);
        }

        #[test]
        fn invariance_is_monotone(delta in 0usize..16, salt in any::<u64>(), n in 1usize..4) {
            let delta = DominoSet::all_subsets().nth(delta).unwrap();
            let q = invariant_query(n, delta, salt);
            prop_assert!(is_shuffle_invariant(&q, delta).unwrap().is_invariant());
            for sub in DominoSet::all_subsets().filter(|s| s.is_subset(delta)) {
                prop_assert!(is_shuffle_invariant(&q, sub).unwrap().is_invariant());
            }
        }

        #[test]
        fn random_matrices_respect_monotonicity(bits in proptest::collection::vec(any::<bool>(), 16), delta in 0usize..16) {
            let q = random_labeled(2, &bits);
            let delta = DominoSet::all_subsets().nth(delta).unwrap();
            if is_shuffle_invariant(&q, delta).unwrap().is_invariant() {
                for sub in DominoSet::all_subsets().filter(|s| s.is_subset(delta)) {
                    prop_assert!(is_shuffle_invariant(&q, sub).unwrap().is_invariant());
                }
            }
        }
    }

    #[test]
    fn two_tally_constructions_pass() {
        assert!(verify_two_tally(&gen_ehd2_gadget().matrix, 2).unwrap().passes());
        for k in 1..=5 {
            let s = gen_shattered_two_tally(k).unwrap();
            assert!(verify_two_tally(&s.matrix, k - 1).unwrap().passes(), "k = {k}");
        }
    }

    #[test]
    fn two_tally_detects_disagreement() {
        let labels = Labels::new(2, vec![bs("00")], vec![bs("01"), bs("10")]).unwrap();
        let ok = PartialMatrix::from_strs(&["11"]).unwrap().with_labels(labels).unwrap();
        assert!(verify_two_tally(&ok, 1).unwrap().passes());

        let labels = Labels::new(2, vec![bs("00")], vec![bs("01"), bs("11")]).unwrap();
        let bad = PartialMatrix::from_strs(&["11"]).unwrap().with_labels(labels).unwrap();
        let report = verify_two_tally(&bad, 1).unwrap();
        assert!(!report.agrees_with_ehd);
        assert_eq!(
            report.first_violation,
            Some(TwoTallyViolation::Disagrees {
                row: 0,
                col: 1,
                value: true,
                distance: 2
            })
        );
        assert!(matches!(
            verify_two_tally(&PartialMatrix::from_strs(&["1"]).unwrap(), 1),
            Err(Error::MissingLabels)
        ));
    }

    #[test]
    fn every_gadget_mutation_is_caught() {
        let g = gen_ehd2_gadget().matrix;
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                let replacements: Vec<Option<bool>> = match g.get(r, c) {
                    Some(v) => vec![Some(!v)],
                    None => vec![Some(false), Some(true)],
                };
                for new in replacements {
                    let mut m = g.clone();
                    m.set(r, c, new);
                    assert!(!verify_two_tally(&m, 2).unwrap().passes(), "({r}, {c}) -> {new:?}");
                }
            }
        }
    }
}
