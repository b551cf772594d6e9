use std::collections::HashMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gt::leq_by_prefixes;
use super::{Parties, Role, Threshold, Transcript};
use crate::bits::BitString;
use crate::error::{Error, Result};

fn check_dims(strings: &[&BitString], d: usize) -> Result<()> {
    for s in strings {
        if s.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                found: s.len(),
            });
        }
    }
    Ok(())
}

/// Binary search for the first position in `from..n` where the parties'
/// strings differ, given that they differ somewhere there.
fn first_difference(oracle: &mut Transcript, parties: &Parties<BitString>, from: usize) -> usize {
    let n = parties.both().0.len();
    let (mut lo, mut hi) = (from, n - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if oracle.equality(parties, "segment", |s| s.slice(from, mid + 1)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Finds up to `k + 1` differing positions one at a time by binary search.
pub fn naive_thd_protocol(x: &BitString, y: &BitString, k: usize) -> Result<(Threshold, Transcript)> {
    check_dims(&[y], x.len())?;
    let parties = Parties::new(x.clone(), y.clone());
    let mut oracle = Transcript::new();
    let mut from = 0;
    let mut found = 0;
    while !oracle.equality(&parties, "suffix", |s| s.slice(from, s.len())) {
        if found == k {
            return Ok((Threshold::Exceeds, oracle));
        }
        found += 1;
        from = first_difference(&mut oracle, &parties, from) + 1;
    }
    Ok((Threshold::Within(found), oracle))
}

/// Split of the coordinates `0..d` into two sorted index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Number of samples drawn, including the accepted one.
    pub tries: usize,
}

/// Distance bound `3 log2 N` used by the partition property.
pub fn partition_threshold(n: usize) -> f64 {
    3.0 * (n as f64).log2()
}

fn radius(n: usize) -> usize {
    partition_threshold(n).ceil() as usize
}

fn dedup_sorted(mut z: Vec<BitString>) -> Vec<BitString> {
    z.sort();
    z.dedup();
    z
}

fn side_ok(z: &[BitString], side: &[usize], limit: f64) -> bool {
    let mut groups: HashMap<BitString, Vec<usize>> = HashMap::new();
    for (i, s) in z.iter().enumerate() {
        groups.entry(s.project(side)).or_default().push(i);
    }
    groups.values().all(|g| {
        g.iter()
            .enumerate()
            .all(|(p, &i)| g[p + 1..].iter().all(|&j| z[i].distance(&z[j]) as f64 <= limit))
    })
}

/// Checks that any two strings of `z` agreeing on one side differ in at
/// most `3 log2 |z|` positions.
pub fn check_partition(z: &[BitString], a: &[usize], b: &[usize]) -> bool {
    let z = dedup_sorted(z.to_vec());
    let limit = partition_threshold(z.len());
    side_ok(&z, a, limit) && side_ok(&z, b, limit)
}

/// Samples uniform coordinate splits until one passes [`check_partition`].
pub fn diameter_partition(z: &[BitString], seed: u64, max_tries: usize) -> Result<Partition> {
    let z = dedup_sorted(z.to_vec());
    if z.len() < 2 {
        return Err(Error::Parameter("need at least two distinct strings".into()));
    }
    let d = z[0].len();
    check_dims(&z.iter().collect::<Vec<_>>(), d)?;
    partition_sorted(&z, seed, max_tries)
}

fn partition_sorted(z: &[BitString], seed: u64, max_tries: usize) -> Result<Partition> {
    let d = z[0].len();
    let limit = partition_threshold(z.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tries in 1..=max_tries {
        let (a, b): (Vec<usize>, Vec<usize>) = (0..d).partition(|_| rng.gen::<bool>());
        if side_ok(z, &a, limit) && side_ok(z, &b, limit) {
            return Ok(Partition { a, b, tries });
        }
    }
    Err(Error::NoPartition { tries: max_tries })
}

/// Distance protocol for a set whose pairwise distances are at most
/// `radius`. `z` must be sorted and deduplicated.
fn bounded(
    oracle: &mut Transcript,
    z: &[BitString],
    radius: usize,
    parties: &Parties<BitString>,
    k: usize,
) -> Threshold {
    let base = &z[0];
    let mut support = BitString::zeros(base.len());
    for w in z {
        support.or_assign(&w.xor(base));
    }
    let index_set = support.ones_positions();
    let rank = |p: usize| index_set.binary_search(&p).expect("position outside I") as u64;
    let domain = index_set.len() as u64 + 1;

    let mut sets = parties.map(|s| s.xor(base).ones_positions());
    let mut c = 0;
    loop {
        if oracle.equality(&sets, "S == T", |s| s.clone()) {
            return Threshold::Within(c);
        }
        if c == k {
            return Threshold::Exceeds;
        }
        c += 1;
        let mut cur = sets.map(|s| s.as_slice().to_vec());
        let mut big_k = radius;
        while big_k > 1 {
            big_k = big_k.div_ceil(2);
            let head = cur.map(|s| s[..s.len().min(big_k)].to_vec());
            if oracle.equality(&head, "first half", |s| s.clone()) {
                cur = cur.map(|s| s[s.len().min(big_k)..].to_vec());
            } else {
                cur = head;
            }
        }
        {
            let (a, b) = cur.both();
            debug_assert!(a.len() <= 1 && b.len() <= 1);
            assert!(
                !(a.is_empty() && b.is_empty()),
                "both halves empty after a failed equality"
            );
        }
        let ranks = cur.map(|s| s.first().map_or(domain - 1, |&p| rank(p)));
        let alice_first = leq_by_prefixes(oracle, &ranks, domain);
        let picked = cur.map(|s| s.first().copied());
        // the smaller element of the symmetric difference belongs to
        // whoever holds it, and that party drops it
        sets = sets.zip_map(&picked, |role, s, p| match p {
            Some(p) if (role == Role::Alice) == alice_first => s.iter().copied().filter(|q| q != p).collect(),
            _ => s.clone(),
        });
    }
}

/// Threshold distance on a set of small diameter. Pairwise distances in `z`
/// must be at most `3 log2 |z|`; debug builds check this.
pub fn bounded_diameter_threshold(
    z: &[BitString],
    x: &BitString,
    y: &BitString,
    k: usize,
) -> Result<(Threshold, Transcript)> {
    let z = dedup_sorted(z.to_vec());
    if z.is_empty() {
        return Err(Error::Parameter("empty set".into()));
    }
    check_dims(&z.iter().chain([x, y]).collect::<Vec<_>>(), z[0].len())?;
    if z.binary_search(x).is_err() || z.binary_search(y).is_err() {
        return Err(Error::Parameter("inputs must belong to the set".into()));
    }
    let r = radius(z.len());
    if cfg!(debug_assertions) {
        for (i, u) in z.iter().enumerate() {
            if let Some(v) = z[i + 1..].iter().find(|v| u.distance(v) > r) {
                return Err(Error::Precondition(format!("dist({u}, {v}) exceeds {r}")));
            }
        }
    }
    let mut oracle = Transcript::new();
    let out = bounded(&mut oracle, &z, r, &Parties::new(x.clone(), y.clone()), k);
    Ok((out, oracle))
}

/// Default number of partition samples per recursion level.
pub const DEFAULT_PARTITION_TRIES: usize = 64;

fn splitmix(mut v: u64) -> u64 {
    v = v.wrapping_add(0x9e37_79b9_7f4a_7c15);
    v = (v ^ (v >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    v = (v ^ (v >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    v ^ (v >> 31)
}

struct Level {
    z: Vec<BitString>,
    seed: u64,
    split: OnceLock<Option<Box<Split>>>,
}

struct Split {
    a: Vec<usize>,
    b: Vec<usize>,
    radius: usize,
    child_a: Level,
    child_b: Level,
    // projection on one side -> sorted projections on the other side
    fiber_a: HashMap<BitString, Vec<BitString>>,
    fiber_b: HashMap<BitString, Vec<BitString>>,
}

impl Level {
    fn new(z: Vec<BitString>, seed: u64) -> Self {
        Self {
            z,
            seed,
            split: OnceLock::new(),
        }
    }

    fn split(&self, max_tries: usize) -> Result<&Split> {
        self.split
            .get_or_init(|| {
                let p = partition_sorted(&self.z, self.seed, max_tries).ok()?;
                let mut fiber_a: HashMap<BitString, Vec<BitString>> = HashMap::new();
                let mut fiber_b: HashMap<BitString, Vec<BitString>> = HashMap::new();
                for w in &self.z {
                    let (wa, wb) = (w.project(&p.a), w.project(&p.b));
                    fiber_a.entry(wa.clone()).or_default().push(wb.clone());
                    fiber_b.entry(wb).or_default().push(wa);
                }
                for v in fiber_a.values_mut().chain(fiber_b.values_mut()) {
                    v.sort();
                    v.dedup();
                }
                let za = dedup_sorted(fiber_a.keys().cloned().collect());
                let zb = dedup_sorted(fiber_b.keys().cloned().collect());
                Some(Box::new(Split {
                    a: p.a,
                    b: p.b,
                    radius: radius(self.z.len()),
                    child_a: Level::new(za, splitmix(self.seed ^ 1)),
                    child_b: Level::new(zb, splitmix(self.seed ^ 2)),
                    fiber_a,
                    fiber_b,
                }))
            })
            .as_deref()
            .ok_or(Error::NoPartition { tries: max_tries })
    }
}

/// The recursive threshold-distance protocol over shared sets `X` and `Y`.
///
/// Partitions are sampled lazily per recursion node and cached, so one
/// value can serve many runs (also concurrently).
pub struct ThresholdDistance {
    x_set: Vec<BitString>,
    y_set: Vec<BitString>,
    root: Level,
    max_tries: usize,
}

impl ThresholdDistance {
    pub fn new(x_set: &[BitString], y_set: &[BitString], seed: u64) -> Result<Self> {
        Self::with_tries(x_set, y_set, seed, DEFAULT_PARTITION_TRIES)
    }

    pub fn with_tries(x_set: &[BitString], y_set: &[BitString], seed: u64, max_tries: usize) -> Result<Self> {
        let x_set = dedup_sorted(x_set.to_vec());
        let y_set = dedup_sorted(y_set.to_vec());
        let (Some(first), false) = (x_set.first(), y_set.is_empty()) else {
            return Err(Error::Parameter("X and Y must be non-empty".into()));
        };
        check_dims(&x_set.iter().chain(&y_set).collect::<Vec<_>>(), first.len())?;
        let z = dedup_sorted(x_set.iter().chain(&y_set).cloned().collect());
        Ok(Self {
            x_set,
            y_set,
            root: Level::new(z, seed),
            max_tries,
        })
    }

    /// `N = |X ∪ Y|`.
    pub fn n(&self) -> usize {
        self.root.z.len()
    }

    pub fn dim(&self) -> usize {
        self.root.z[0].len()
    }

    pub fn z(&self) -> &[BitString] {
        &self.root.z
    }

    pub fn run(&self, x: &BitString, y: &BitString, k: usize) -> Result<(Threshold, Transcript)> {
        if self.x_set.binary_search(x).is_err() {
            return Err(Error::Parameter(format!("{x} is not in X")));
        }
        if self.y_set.binary_search(y).is_err() {
            return Err(Error::Parameter(format!("{y} is not in Y")));
        }
        let mut oracle = Transcript::new();
        let out = self.recurse(&self.root, &Parties::new(x.clone(), y.clone()), k, &mut oracle)?;
        Ok((out, oracle))
    }

    fn recurse(
        &self,
        level: &Level,
        parties: &Parties<BitString>,
        k: usize,
        oracle: &mut Transcript,
    ) -> Result<Threshold> {
        if oracle.equality(parties, "x == y", |s| s.clone()) {
            return Ok(Threshold::Within(0));
        }
        if k == 0 {
            return Ok(Threshold::Exceeds);
        }
        let split = level.split(self.max_tries)?;
        let pa = parties.map(|s| s.project(&split.a));
        let pb = parties.map(|s| s.project(&split.b));
        let same_a = oracle.equality(&pa, "x_A == y_A", |s| s.clone());
        let same_b = oracle.equality(&pb, "x_B == y_B", |s| s.clone());
        assert!(!(same_a && same_b), "halves agree but the strings differ");
        if same_a {
            let fiber = &split.fiber_a[pa.agreed()];
            return Ok(bounded(oracle, fiber, split.radius, &pb, k));
        }
        if same_b {
            let fiber = &split.fiber_b[pb.agreed()];
            return Ok(bounded(oracle, fiber, split.radius, &pa, k));
        }
        let t = match self.recurse(&split.child_a, &pa, k - 1, oracle)? {
            Threshold::Within(t) => t,
            Threshold::Exceeds => return Ok(Threshold::Exceeds),
        };
        Ok(match self.recurse(&split.child_b, &pb, k - t, oracle)? {
            Threshold::Within(r) => Threshold::Within(t + r),
            Threshold::Exceeds => Threshold::Exceeds,
        })
    }
}

/// One-shot form of [`ThresholdDistance::run`].
pub fn threshold_distance(
    x_set: &[BitString],
    y_set: &[BitString],
    x: &BitString,
    y: &BitString,
    k: usize,
    seed: u64,
) -> Result<(Threshold, Transcript)> {
    ThresholdDistance::new(x_set, y_set, seed)?.run(x, y, k)
}
