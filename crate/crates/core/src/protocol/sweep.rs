use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{naive_thd_protocol, ClusteredSet, Threshold, ThresholdDistance};
use crate::error::{Error, Result};

/// Which distance protocol a sweep measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepProtocol {
    ThresholdDistance,
    Naive,
}

/// Instance shape for query-count sweeps.
#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub cluster_size: usize,
    pub spread: usize,
    /// Probability that a sampled pair comes from one cluster.
    pub near: f64,
}

impl SweepConfig {
    pub fn new(n: usize, d: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            d,
            trials,
            seed,
            cluster_size: 16,
            spread: 2,
            near: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub max_queries: usize,
    pub mean_queries: f64,
    pub seed: u64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "N,d,k,max_queries,mean_queries,seed";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{}",
            self.n, self.d, self.k, self.max_queries, self.mean_queries, self.seed
        )
    }
}

pub(crate) fn mix(seed: u64, index: u64) -> u64 {
    let mut v = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    v = (v ^ (v >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    v = (v ^ (v >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    v ^ (v >> 31)
}

/// Runs `trials` random pairs per `k` on one random clustered set `Z`
/// (with `X = Y = Z`), checks every output against the true distance and
/// reports query counts. Each trial draws from its own seed, so results do
/// not depend on the thread count.
pub fn sweep(protocol: SweepProtocol, config: &SweepConfig, ks: &[usize]) -> Result<Vec<SweepRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let set = ClusteredSet::sample(&mut rng, config.n, config.d, config.cluster_size, config.spread);
    let td = match protocol {
        SweepProtocol::ThresholdDistance => {
            Some(ThresholdDistance::new(&set.points, &set.points, mix(config.seed, 1))?)
        }
        SweepProtocol::Naive => None,
    };
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(config.trials.max(1));
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let counts: Result<Vec<Vec<usize>>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let (set, td) = (&set, td.as_ref());
                    s.spawn(move || -> Result<Vec<usize>> {
                        let mut out = Vec::new();
                        for trial in (t..config.trials).step_by(threads) {
                            let mut r = ChaCha8Rng::seed_from_u64(mix(config.seed ^ k as u64, trial as u64 + 2));
                            let (x, y) = set.sample_pair(&mut r, config.near);
                            let (got, transcript) = match td {
                                Some(td) => td.run(x, y, k)?,
                                None => naive_thd_protocol(x, y, k)?,
                            };
                            if got != Threshold::classify(x.distance(y), k) {
                                return Err(Error::Verification(format!(
                                    "wrong answer {got} on a pair at distance {}",
                                    x.distance(y)
                                )));
                            }
                            out.push(transcript.queries());
                        }
                        Ok(out)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        let counts: Vec<usize> = counts?.into_iter().flatten().collect();
        rows.push(SweepRow {
            n: config.n,
            d: config.d,
            k,
            max_queries: counts.iter().copied().max().unwrap_or(0),
            mean_queries: counts.iter().sum::<usize>() as f64 / counts.len().max(1) as f64,
            seed: config.seed,
        });
    }
    Ok(rows)
}
