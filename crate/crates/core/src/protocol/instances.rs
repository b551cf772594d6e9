use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitString;

/// Random strings grouped around random centers, so that pairs at small
/// distance are common.
#[derive(Clone, Debug)]
pub struct ClusteredSet {
    pub points: Vec<BitString>,
    members: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
}

impl ClusteredSet {
    /// `n` distinct strings of length `d`, each at most `spread` flips away
    /// from one of `n / cluster_size` centers.
    pub fn sample<R: Rng>(rng: &mut R, n: usize, d: usize, cluster_size: usize, spread: usize) -> Self {
        let centers: Vec<BitString> = (0..n.div_ceil(cluster_size.max(1)))
            .map(|_| BitString::from_bits((0..d).map(|_| rng.gen::<bool>())))
            .collect();
        let mut seen = std::collections::HashSet::new();
        let mut points = Vec::with_capacity(n);
        let mut cluster_of = Vec::with_capacity(n);
        let mut members = vec![Vec::new(); centers.len()];
        let mut attempts = 0usize;
        while points.len() < n {
            attempts += 1;
            assert!(attempts < 1000 * n.max(1), "cannot draw {n} distinct strings");
            let c = points.len() % centers.len();
            let mut p = centers[c].clone();
            for _ in 0..rng.gen_range(0..=spread) {
                let i = rng.gen_range(0..d);
                p.set(i, !p.get(i));
            }
            if seen.insert(p.clone()) {
                members[c].push(points.len());
                cluster_of.push(c);
                points.push(p);
            }
        }
        Self {
            points,
            members,
            cluster_of,
        }
    }

    pub fn cluster_of(&self, i: usize) -> usize {
        self.cluster_of[i]
    }

    /// Indices of the points drawn around center `c`.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    /// A random pair, taken from one cluster with probability `near`.
    pub fn sample_pair<R: Rng>(&self, rng: &mut R, near: f64) -> (&BitString, &BitString) {
        let i = rng.gen_range(0..self.points.len());
        let j = if rng.gen_bool(near) {
            *self.members[self.cluster_of[i]].choose(rng).unwrap()
        } else {
            rng.gen_range(0..self.points.len())
        };
        (&self.points[i], &self.points[j])
    }
}
