//! Oracle protocols with exact query accounting.
//!
//! Every protocol here is written against [`Parties`]: each party's data
//! lives in its own slot, and an oracle argument is computed by a closure
//! that sees exactly one slot plus whatever the protocol shares publicly.
//! Answers are public. The transcript records, per query, a digest of each
//! party's argument so tests can check that a party's arguments depend only
//! on its own input and the answers so far.

mod gt;
mod hamming;
mod instances;
mod sweep;
mod tree;

pub use gt::{eq_gt_protocol, gt_query_bound};
pub use hamming::{
    bounded_diameter_threshold, check_partition, diameter_partition, naive_thd_protocol, partition_threshold,
    threshold_distance, Partition, ThresholdDistance, DEFAULT_PARTITION_TRIES,
};
pub use instances::ClusteredSet;
pub use sweep::{sweep, SweepConfig, SweepProtocol, SweepRow};
pub use tree::{eval_protocol, flatten_protocol, random_tree, ProtocolTree, MAX_FLATTEN_QUERIES, MAX_TREE_HEIGHT};

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

/// Oracle tag of the Equality oracle.
pub const EQ: &str = "EQ";

/// Result of a threshold-distance protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Threshold {
    /// The distance, known to be at most the threshold.
    Within(usize),
    /// The distance exceeds the threshold (the `⊥` answer).
    Exceeds,
}

impl Threshold {
    /// The brute-force rule the protocols must reproduce.
    pub fn classify(distance: usize, k: usize) -> Self {
        if distance <= k {
            Threshold::Within(distance)
        } else {
            Threshold::Exceeds
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Within(d) => write!(f, "{d}"),
            Threshold::Exceeds => f.write_str("⊥"),
        }
    }
}

/// One oracle call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub oracle: &'static str,
    pub description: Cow<'static, str>,
    pub answer: bool,
    pub alice_digest: u64,
    pub bob_digest: u64,
}

/// Ordered log of oracle calls with per-oracle counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
    counts: BTreeMap<&'static str, usize>,
}

fn digest<V: Hash>(v: &V) -> u64 {
    let mut h = DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    /// Total number of oracle calls.
    pub fn queries(&self) -> usize {
        self.entries.len()
    }

    pub fn count(&self, oracle: &str) -> usize {
        self.counts.get(oracle).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<&'static str, usize> {
        &self.counts
    }

    pub(crate) fn record(&mut self, entry: TranscriptEntry) {
        *self.counts.entry(entry.oracle).or_default() += 1;
        self.entries.push(entry);
    }

    /// Equality query where both parties apply the same rule to their own
    /// view.
    pub fn equality<S, V, F>(&mut self, parties: &Parties<S>, description: impl Into<Cow<'static, str>>, arg: F) -> bool
    where
        V: PartialEq + Hash,
        F: Fn(&S) -> V,
    {
        self.equality_split(parties, description, &arg, &arg)
    }

    /// Equality query with a different rule per party.
    pub fn equality_split<S, V>(
        &mut self,
        parties: &Parties<S>,
        description: impl Into<Cow<'static, str>>,
        alice_arg: impl Fn(&S) -> V,
        bob_arg: impl Fn(&S) -> V,
    ) -> bool
    where
        V: PartialEq + Hash,
    {
        let a = alice_arg(&parties.alice);
        let b = bob_arg(&parties.bob);
        let answer = a == b;
        self.record(TranscriptEntry {
            oracle: EQ,
            description: description.into(),
            answer,
            alice_digest: digest(&a),
            bob_digest: digest(&b),
        });
        answer
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(f, "{i:>4} {} {} -> {}", e.oracle, e.description, e.answer as u8)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Alice,
    Bob,
}

/// Per-party private state.
#[derive(Clone, Debug)]
pub struct Parties<S> {
    alice: S,
    bob: S,
}

impl<S> Parties<S> {
    pub fn new(alice: S, bob: S) -> Self {
        Self { alice, bob }
    }

    /// Each party derives new private state from its own state.
    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Parties<T> {
        Parties {
            alice: f(&self.alice),
            bob: f(&self.bob),
        }
    }

    pub fn map_with_role<T>(&self, f: impl Fn(Role, &S) -> T) -> Parties<T> {
        Parties {
            alice: f(Role::Alice, &self.alice),
            bob: f(Role::Bob, &self.bob),
        }
    }

    /// Each party combines two pieces of its own state.
    pub fn zip_map<T, U>(&self, other: &Parties<T>, f: impl Fn(Role, &S, &T) -> U) -> Parties<U> {
        Parties {
            alice: f(Role::Alice, &self.alice, &other.alice),
            bob: f(Role::Bob, &self.bob, &other.bob),
        }
    }

    pub fn update(&mut self, f: impl Fn(Role, &mut S)) {
        f(Role::Alice, &mut self.alice);
        f(Role::Bob, &mut self.bob);
    }

    /// The common state after an equality query on it answered 1.
    pub(crate) fn agreed(&self) -> &S
    where
        S: PartialEq,
    {
        debug_assert!(self.alice == self.bob);
        &self.alice
    }

    /// Both states, for final assertions in tests and debug checks.
    pub(crate) fn both(&self) -> (&S, &S) {
        (&self.alice, &self.bob)
    }
}
