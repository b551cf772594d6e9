use std::sync::Arc;

use rand::Rng;

use super::{Parties, Transcript};
use crate::error::{Error, Result};
use crate::matrix::BitMatrix;
use crate::reduction::ReductionWitness;

/// Height limit accepted by [`flatten_protocol`].
pub const MAX_TREE_HEIGHT: usize = 16;
/// Inner-node limit accepted by [`flatten_protocol`]; the truth table has
/// `2^c` entries.
pub const MAX_FLATTEN_QUERIES: usize = 22;

/// Oracle protocol as a binary decision tree over query matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolTree {
    Leaf(bool),
    Query {
        query: Arc<BitMatrix>,
        on_zero: Box<ProtocolTree>,
        on_one: Box<ProtocolTree>,
    },
}

impl ProtocolTree {
    pub fn query(query: Arc<BitMatrix>, on_zero: ProtocolTree, on_one: ProtocolTree) -> Self {
        ProtocolTree::Query {
            query,
            on_zero: Box::new(on_zero),
            on_one: Box::new(on_one),
        }
    }

    /// Single query whose answer is the output.
    pub fn single(query: Arc<BitMatrix>) -> Self {
        Self::query(query, ProtocolTree::Leaf(false), ProtocolTree::Leaf(true))
    }

    pub fn height(&self) -> usize {
        match self {
            ProtocolTree::Leaf(_) => 0,
            ProtocolTree::Query { on_zero, on_one, .. } => 1 + on_zero.height().max(on_one.height()),
        }
    }

    pub fn inner_nodes(&self) -> usize {
        match self {
            ProtocolTree::Leaf(_) => 0,
            ProtocolTree::Query { on_zero, on_one, .. } => 1 + on_zero.inner_nodes() + on_one.inner_nodes(),
        }
    }

    /// Common shape of all queries, or `None` for a bare leaf.
    pub fn domain(&self) -> Result<Option<(usize, usize)>> {
        let mut shape = None;
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let ProtocolTree::Query { query, on_zero, on_one } = node {
                let s = (query.rows(), query.cols());
                match shape {
                    None => shape = Some(s),
                    Some(t) if t != s => {
                        return Err(Error::MalformedTree(format!(
                            "query shapes {}x{} and {}x{} differ",
                            t.0, t.1, s.0, s.1
                        )))
                    }
                    _ => {}
                }
                stack.push(on_one);
                stack.push(on_zero);
            }
        }
        Ok(shape)
    }
}

/// Random tree of height at most `height` over uniformly random `n x n`
/// queries; each node becomes a leaf early with probability 1/5.
pub fn random_tree<R: Rng>(rng: &mut R, height: usize, n: usize) -> ProtocolTree {
    if height == 0 || rng.gen_bool(0.2) {
        return ProtocolTree::Leaf(rng.gen());
    }
    let q = Arc::new(BitMatrix::from_fn(n, n, |_, _| rng.gen()));
    let zero = random_tree(rng, height - 1, n);
    let one = random_tree(rng, height - 1, n);
    ProtocolTree::query(q, zero, one)
}

/// Runs the tree on input `(x, y)`.
pub fn eval_protocol(tree: &ProtocolTree, x: usize, y: usize) -> Result<(bool, Transcript)> {
    if let Some((r, c)) = tree.domain()? {
        if x >= r || y >= c {
            return Err(Error::Parameter(format!("input ({x}, {y}) outside the {r}x{c} domain")));
        }
    }
    let parties = Parties::new(x, y);
    let mut transcript = Transcript::new();
    let mut node = tree;
    let mut id = 0usize;
    loop {
        match node {
            ProtocolTree::Leaf(b) => return Ok((*b, transcript)),
            ProtocolTree::Query { query, on_zero, on_one } => {
                let answer = query.get(x, y);
                let (a, b) = parties.both();
                transcript.record(super::TranscriptEntry {
                    oracle: "Q",
                    description: format!("node {id}").into(),
                    answer,
                    alice_digest: *a as u64,
                    bob_digest: *b as u64,
                });
                if answer {
                    id += 1 + on_zero.inner_nodes();
                    node = on_one;
                } else {
                    id += 1;
                    node = on_zero;
                }
            }
        }
    }
}

/// Rewrites the tree as `f(Q_1, .., Q_c)` with one query per inner node in
/// preorder.
pub fn flatten_protocol(tree: &ProtocolTree) -> Result<ReductionWitness> {
    tree.domain()?;
    let h = tree.height();
    if h > MAX_TREE_HEIGHT {
        return Err(Error::Parameter(format!("tree height {h} exceeds {MAX_TREE_HEIGHT}")));
    }
    let c = tree.inner_nodes();
    if c > MAX_FLATTEN_QUERIES {
        return Err(Error::Parameter(format!(
            "{c} inner nodes exceed the truth-table limit of {MAX_FLATTEN_QUERIES}"
        )));
    }
    let mut queries = Vec::with_capacity(c);
    collect(tree, &mut queries);
    let f = (0..1usize << c).map(|a| walk(tree, a)).collect();
    Ok(ReductionWitness { queries, f })
}

fn collect(node: &ProtocolTree, out: &mut Vec<BitMatrix>) {
    if let ProtocolTree::Query { query, on_zero, on_one } = node {
        out.push((**query).clone());
        collect(on_zero, out);
        collect(on_one, out);
    }
}

fn walk(tree: &ProtocolTree, answers: usize) -> bool {
    let mut node = tree;
    let mut id = 0;
    loop {
        match node {
            ProtocolTree::Leaf(b) => return *b,
            ProtocolTree::Query { on_zero, on_one, .. } => {
                if answers >> id & 1 == 1 {
                    id += 1 + on_zero.inner_nodes();
                    node = on_one;
                } else {
                    id += 1;
                    node = on_zero;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gen_equality;
    use crate::reduction::verify_witness;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_query_tree() {
        let q = Arc::new(gen_equality(2).unwrap());
        let t = ProtocolTree::single(q.clone());
        for x in 0..4 {
            for y in 0..4 {
                let (b, tr) = eval_protocol(&t, x, y).unwrap();
                assert_eq!(b, x == y);
                assert_eq!(tr.queries(), 1);
            }
        }
        let w = flatten_protocol(&t).unwrap();
        assert_eq!(w.c(), 1);
        assert_eq!(w.f, vec![false, true]);
    }

    #[test]
    fn complete_depth_two_has_three_queries() {
        let q = Arc::new(BitMatrix::zeros(2, 2));
        let leafy = || ProtocolTree::single(q.clone());
        let t = ProtocolTree::query(q.clone(), leafy(), leafy());
        assert_eq!(flatten_protocol(&t).unwrap().c(), 3);
    }

    #[test]
    fn flatten_agrees_with_eval_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = random_tree(&mut rng, 3, 8);
            let w = flatten_protocol(&t).unwrap();
            assert_eq!(w.c(), t.inner_nodes());
            for x in 0..8 {
                for y in 0..8 {
                    let (b, tr) = eval_protocol(&t, x, y).unwrap();
                    assert!(tr.queries() <= t.height());
                    assert_eq!(w.evaluate(x, y), b);
                }
            }
            let target = BitMatrix::from_fn(8, 8, |x, y| eval_protocol(&t, x, y).unwrap().0);
            assert!(verify_witness(&target, &w).unwrap());
        }
    }

    #[test]
    fn malformed_and_oversized_trees() {
        let a = Arc::new(BitMatrix::zeros(2, 2));
        let b = Arc::new(BitMatrix::zeros(3, 2));
        let t = ProtocolTree::query(a.clone(), ProtocolTree::single(b), ProtocolTree::Leaf(true));
        assert!(matches!(eval_protocol(&t, 0, 0), Err(Error::MalformedTree(_))));
        assert!(eval_protocol(&ProtocolTree::single(a.clone()), 2, 0).is_err());

        let mut deep = ProtocolTree::Leaf(false);
        for _ in 0..17 {
            deep = ProtocolTree::query(a.clone(), deep, ProtocolTree::Leaf(true));
        }
        assert!(flatten_protocol(&deep).is_err());
    }
}
