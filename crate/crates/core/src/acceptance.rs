//! The acceptance suite: one check per criterion, shared by the `accept`
//! subcommand and the `acceptance` test target.
//!
//! Every check is deterministic. Tolerances and sample sizes are the
//! constants below.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{cube, BitString};
use crate::domino::{is_shuffle_invariant, verify_two_tally, Domino, DominoSet, ShuffleVerdict};
use crate::error::Result;
use crate::matrix::{contains_pattern, BitMatrix, Labels, PartialMatrix, DEFAULT_SEARCH_BUDGET};
use crate::problems::{gen_ehd, gen_ehd2_gadget, gen_equality, gen_gt, gen_iip, gen_shattered_two_tally};
use crate::protocol::{
    check_partition, diameter_partition, eq_gt_protocol, eval_protocol, flatten_protocol, gt_query_bound,
    partition_threshold, random_tree, sweep, ClusteredSet, SweepConfig, SweepProtocol, SweepRow, Threshold,
    ThresholdDistance,
};
use crate::ramsey::{
    extract_invariant_queries, find_homogeneous, is_homogeneous, SubsetColoring, DEFAULT_RAMSEY_BUDGET,
};
use crate::reduction::{
    is_blocky, search_reduction, verify_witness, BlockyEnumerator, BlockyLabeling, QueryEnumerator, ReductionWitness,
    SearchOptions,
};
use crate::structure::{max_gt_size, vc_dimension};

/// Pinned bound on `max_queries / ((k + 1) log2 log2 N)` for the
/// threshold-distance protocol.
pub const QUERY_CONSTANT: f64 = 6.0;
/// Runtime limit for the correctness sweep.
pub const CORRECTNESS_TIME_LIMIT: Duration = Duration::from_secs(120);

const SCALING_EXPONENTS: [u32; 4] = [6, 8, 10, 12];
const SCALING_KS: [usize; 4] = [1, 2, 3, 4];
const SCALING_SEEDS: u64 = 4;
const SCALING_TRIALS: usize = 5000;
const SCALING_SPREAD: usize = 3;
const DIM_COMPARISON_N: usize = 256;
const DIM_COMPARISON: [usize; 2] = [64, 4096];

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const TITLES: [&str; 9] = [
    "threshold distance correctness",
    "query scaling",
    "diameter partition",
    "structural numbers",
    "gadget verification",
    "shuffle invariance",
    "Ramsey mechanics",
    "reduction facts",
    "mutation sensitivity",
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => protocol_correctness(),
        2 => query_scaling(),
        3 => partition_check(),
        4 => structural_numbers(),
        5 => gadget_check(),
        6 => shuffle_invariance(),
        7 => ramsey_mechanics(),
        8 => reduction_facts(),
        9 => mutation_sensitivity(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=TITLES.len()).map(run_criterion).collect()
}

type Outcome = Result<(bool, String)>;

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Applies `f` to every job on a small thread pool, keeping job order.
fn par_map<J: Sync, T: Send>(jobs: &[J], f: impl Fn(&J) -> T + Sync) -> Vec<T> {
    let workers = threads().min(jobs.len().max(1));
    let mut out: Vec<(usize, T)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || {
                    (w..jobs.len())
                        .step_by(workers)
                        .map(|i| (i, f(&jobs[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, t)| t).collect()
}

fn check_run(td: &ThresholdDistance, x: &BitString, y: &BitString, k: usize) -> Result<bool> {
    Ok(td.run(x, y, k)?.0 == Threshold::classify(x.distance(y), k))
}

fn protocol_correctness() -> Outcome {
    let start = Instant::now();
    // exhaustive: |X ∪ Y| <= 32, d <= 16, k <= 3
    let small: Vec<u64> = (0..60).collect();
    let small_runs = par_map(&small, |&seed| -> Result<(usize, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(6..=16);
        let total = rng.gen_range(8..=32);
        let set = ClusteredSet::sample(&mut rng, total, d, 4, 3);
        let cut = rng.gen_range(1..total);
        let (xs, ys) = set.points.split_at(cut);
        let ys: Vec<BitString> = ys.iter().chain(&xs[..cut / 2]).cloned().collect();
        let td = ThresholdDistance::new(xs, &ys, seed)?;
        let (mut runs, mut bad) = (0, 0);
        for x in xs {
            for y in &ys {
                for k in 0..=3 {
                    runs += 1;
                    bad += !check_run(&td, x, y, k)? as usize;
                }
            }
        }
        Ok((runs, bad))
    });
    let (mut runs, mut bad) = (0, 0);
    for r in small_runs {
        let (a, b) = r?;
        runs += a;
        bad += b;
    }

    // random: |X| = |Y| = 64, d in {64, 256, 1024}, k <= 4, 20 seeds
    let jobs: Vec<(usize, u64)> = [64, 256, 1024]
        .iter()
        .flat_map(|&d| (0..20).map(move |s| (d, s)))
        .collect();
    let big_runs = par_map(&jobs, |&(d, seed)| -> Result<(usize, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed * 7919 + d as u64);
        let set = ClusteredSet::sample(&mut rng, 128, d, 8, 3);
        // even indices form X, odd ones Y; clusters alternate, so both
        // sides meet every cluster
        let xs: Vec<BitString> = set.points.iter().step_by(2).cloned().collect();
        let ys: Vec<BitString> = set.points.iter().skip(1).step_by(2).cloned().collect();
        let td = ThresholdDistance::new(&xs, &ys, seed)?;
        let mut bad = 0;
        for _ in 0..10_000 {
            let i = 2 * rng.gen_range(0..64);
            let near: Vec<usize> = set
                .members(set.cluster_of(i))
                .iter()
                .copied()
                .filter(|j| j % 2 == 1)
                .collect();
            let j = match near.choose(&mut rng) {
                Some(&j) if rng.gen_bool(0.8) => j,
                _ => 2 * rng.gen_range(0..64) + 1,
            };
            let k = rng.gen_range(0..=4);
            bad += !check_run(&td, &set.points[i], &set.points[j], k)? as usize;
        }
        Ok((10_000, bad))
    });
    for r in big_runs {
        let (a, b) = r?;
        runs += a;
        bad += b;
    }
    let elapsed = start.elapsed();
    Ok((
        bad == 0 && elapsed < CORRECTNESS_TIME_LIMIT,
        format!("{runs} runs, {bad} mismatches, {:.1}s", elapsed.as_secs_f64()),
    ))
}

fn scaling_max(protocol: SweepProtocol, n: usize, d: usize) -> Result<Vec<usize>> {
    let mut best = vec![0; SCALING_KS.len()];
    for seed in 0..SCALING_SEEDS {
        let mut config = SweepConfig::new(n, d, SCALING_TRIALS, seed);
        config.spread = SCALING_SPREAD;
        let rows: Vec<SweepRow> = sweep(protocol, &config, &SCALING_KS)?;
        for (b, r) in best.iter_mut().zip(&rows) {
            *b = (*b).max(r.max_queries);
        }
    }
    Ok(best)
}

fn query_scaling() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    // Greater-Than from Equality, every N <= 512 and every pair
    let ns: Vec<u64> = (1..=512).collect();
    let worst = par_map(&ns, |&n| -> Result<(u64, bool)> {
        let mut fine = true;
        for i in 1..=n {
            for j in 1..=n {
                let (ans, t) = eq_gt_protocol(n, i, j)?;
                fine &= ans == (i <= j) && t.queries() <= gt_query_bound(n);
            }
        }
        Ok((n, fine))
    });
    let gt_failures: Vec<u64> = worst
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, fine)| !fine)
        .map(|(n, _)| n)
        .collect();
    ok &= gt_failures.is_empty();
    notes.push(format!("GT bound holds for all N <= 512: {}", gt_failures.is_empty()));

    let mut maxima = Vec::new();
    for e in SCALING_EXPONENTS {
        let n = 1usize << e;
        maxima.push(scaling_max(SweepProtocol::ThresholdDistance, n, 4 * n)?);
    }
    let mut worst_ratio: f64 = 0.0;
    for (row, e) in maxima.iter().zip(SCALING_EXPONENTS) {
        for (&m, k) in row.iter().zip(SCALING_KS) {
            worst_ratio = worst_ratio.max(m as f64 / ((k + 1) as f64 * (e as f64).log2()));
        }
    }
    ok &= worst_ratio <= QUERY_CONSTANT;
    for (ki, k) in SCALING_KS.iter().enumerate() {
        let seq: Vec<usize> = maxima.iter().map(|r| r[ki]).collect();
        let monotone = seq.windows(2).all(|w| w[0] <= w[1]);
        let first_e = SCALING_EXPONENTS[0] as f64;
        let last_e = SCALING_EXPONENTS[SCALING_EXPONENTS.len() - 1] as f64;
        let slower = (seq[seq.len() - 1] as f64 / seq[0] as f64) < last_e / first_e;
        ok &= monotone && slower;
        notes.push(format!("k={k} maxima {seq:?}"));
    }
    notes.push(format!("worst ratio {worst_ratio:.3} (C = {QUERY_CONSTANT})"));

    let [d_lo, d_hi] = DIM_COMPARISON;
    let naive_lo = scaling_max(SweepProtocol::Naive, DIM_COMPARISON_N, d_lo)?;
    let naive_hi = scaling_max(SweepProtocol::Naive, DIM_COMPARISON_N, d_hi)?;
    let td_lo = scaling_max(SweepProtocol::ThresholdDistance, DIM_COMPARISON_N, d_lo)?;
    let td_hi = scaling_max(SweepProtocol::ThresholdDistance, DIM_COMPARISON_N, d_hi)?;
    let naive_grows = naive_lo.iter().zip(&naive_hi).all(|(a, b)| b > a);
    let td_flat = td_lo.iter().zip(&td_hi).all(|(a, b)| b <= a);
    ok &= naive_grows && td_flat;
    notes.push(format!(
        "N={DIM_COMPARISON_N}: naive d={d_lo} {naive_lo:?} d={d_hi} {naive_hi:?}; threshold d={d_lo} {td_lo:?} d={d_hi} {td_hi:?}"
    ));
    Ok((ok, notes.join("; ")))
}

fn pairs_ok(z: &[BitString], a: &[usize], b: &[usize]) -> bool {
    let limit = partition_threshold(z.len());
    z.iter().enumerate().all(|(i, u)| {
        z[i + 1..].iter().all(|v| {
            let agree = |side: &[usize]| side.iter().all(|&p| u.get(p) == v.get(p));
            !(agree(a) || agree(b)) || u.distance(v) as f64 <= limit
        })
    })
}

fn partition_check() -> Outcome {
    let seeds: Vec<u64> = (0..100).collect();
    let results = par_map(&seeds, |&seed| -> Result<(bool, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<BitString> = (0..128)
            .map(|_| BitString::from_bits((0..512).map(|_| rng.gen::<bool>())))
            .collect();
        let p = diameter_partition(&z, seed, 16)?;
        Ok((pairs_ok(&z, &p.a, &p.b) && check_partition(&z, &p.a, &p.b), p.tries))
    });
    let mut ok = 0;
    let mut max_tries = 0;
    for r in results {
        match r {
            Ok((valid, tries)) => {
                ok += valid as usize;
                max_tries = max_tries.max(tries);
            }
            Err(e) => return Ok((false, format!("sampling failed: {e}"))),
        }
    }
    Ok((ok == 100, format!("{ok}/100 valid, at most {max_tries} tries")))
}

fn structural_numbers() -> Outcome {
    let b = DEFAULT_SEARCH_BUDGET;
    let mut notes = Vec::new();
    let vc_eq = vc_dimension(&gen_equality(4)?, 20, b)?;
    let vc_ehd = vc_dimension(&gen_ehd(7, 1)?, 20, b)?;
    let mut ok = vc_eq == 1 && vc_ehd == 3;
    notes.push(format!("VC(EQ_4) = {vc_eq}, VC(EHD_1^7) = {vc_ehd}"));
    for k in 1..=4 {
        let m = BitMatrix::try_from(&gen_shattered_two_tally(k)?.matrix)?;
        let vc = vc_dimension(&m, 20, b)?;
        ok &= vc == k;
        notes.push(format!("VC(shattered {k}) = {vc}"));
    }
    for t in 1..=6 {
        let g = max_gt_size(&gen_gt(t)?, 10, b)?.max_gt;
        ok &= g == t;
        notes.push(format!("GT({t}) -> {g}"));
    }
    let iip = max_gt_size(&gen_iip(2, 2)?, 10, b)?.max_gt;
    ok &= iip <= 3;
    notes.push(format!("IIP(2,2) -> {iip}"));
    Ok((ok, notes.join(", ")))
}

fn gadget_check() -> Outcome {
    let g = gen_ehd2_gadget();
    let passes = verify_two_tally(&g.matrix, 2)?.passes();
    let ehd = gen_ehd(7, 2)?;
    let labels = g.matrix.require_labels()?;
    let mut matches = true;
    for (r, x) in labels.rows().iter().enumerate() {
        for (c, y) in labels.cols().iter().enumerate() {
            if let Some(v) = g.matrix.get(r, c) {
                matches &= ehd.get_by_labels(x, y) == Some(v);
            }
        }
    }
    let k23 = PartialMatrix::from_strs(&["111", "111"])?;
    let completion = g.matrix.complete_with(|_, _| false);
    let found = contains_pattern(&completion, &k23, true, DEFAULT_SEARCH_BUDGET)?.is_some();
    let mut absent_up_to = 0;
    for n in 1..=12 {
        let m = gen_ehd(n, 1)?;
        if contains_pattern(&m, &k23, true, u64::MAX)?.is_some() {
            break;
        }
        // two distinct vertices of the cube share at most two neighbours
        if n <= 8 {
            let rows = m.row_vectors();
            let common_ok = rows.iter().enumerate().all(|(i, u)| {
                rows[i + 1..].iter().all(|v| {
                    let mut w = u.clone();
                    w.and_assign(v);
                    w.count_ones() <= 2
                })
            });
            if !common_ok {
                break;
            }
        }
        absent_up_to = n;
    }
    Ok((
        passes && matches && found && absent_up_to == 12,
        format!(
            "two-tally {passes}, agrees with EHD_2 {matches}, K23 in gadget {found}, K23 absent from EHD_1 up to n = {absent_up_to}"
        ),
    ))
}

fn shuffle_invariance() -> Outcome {
    let mut all = true;
    for n in 1..=6 {
        for k in 0..=n {
            all &= is_shuffle_invariant(&gen_ehd(n, k)?, DominoSet::FULL)?.is_invariant();
        }
    }
    let ls = cube(2);
    let q = gen_gt(4)?.with_labels(Labels::new(2, ls.clone(), ls)?)?;
    let (caught, witness) = match is_shuffle_invariant(&q, DominoSet::FULL)? {
        ShuffleVerdict::Violation { x, y, u, v } => {
            let le = |a: &BitString, b: &BitString| a.to_uint() <= b.to_uint();
            (le(&x, &y) != le(&u, &v), format!("({x},{y}) vs ({u},{v})"))
        }
        ShuffleVerdict::Invariant => (false, "none".into()),
    };
    Ok((
        all && caught,
        format!("EHD invariant for n <= 6: {all}; GT counterexample {witness}"),
    ))
}

fn ramsey_mechanics() -> Outcome {
    let edges: Vec<(usize, usize)> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
    let mut k6 = 0;
    for bits in 0u32..1 << 15 {
        let c = SubsetColoring::from_fn(6, 2, |s| {
            if s.len() == 1 {
                0
            } else {
                bits >> edges.iter().position(|&e| e == (s[0], s[1])).unwrap() & 1
            }
        })?;
        if let Some(t) = find_homogeneous(&c, 3, DEFAULT_RAMSEY_BUDGET)? {
            k6 += is_homogeneous(&c, &t) as usize;
        }
    }
    let pentagon = SubsetColoring::from_fn(5, 2, |s| s.len() == 2 && matches!(s[1] - s[0], 1 | 4))?;
    let pentagon_absent = find_homogeneous(&pentagon, 3, DEFAULT_RAMSEY_BUDGET)?.is_none();

    let mut extracted = 0;
    let cases: [(usize, DominoSet, bool); 3] = [
        (6, DominoSet::EMPTY, false),
        (8, DominoSet::EMPTY, true),
        (12, DominoSet::of(&[Domino::new(false, false)]), true),
    ];
    for &(big, delta, a) in &cases {
        // index, within the dominoes outside `delta`, of the first one other
        // than `aa`; this sees only the `delta`-type
        let q = BitMatrix::from_labels(cube(big), cube(big), |x, y| {
            let kept = (0..big)
                .map(|i| Domino::new(x.get(i), y.get(i)))
                .filter(|d| !delta.contains(*d));
            kept.enumerate()
                .find(|(_, d)| *d != Domino::new(a, a))
                .is_some_and(|(p, _)| p % 3 == 1)
        })?;
        let e = extract_invariant_queries(&[q], 2, delta, a, None, DEFAULT_RAMSEY_BUDGET)?;
        let wider = delta.with(Domino::new(a, a));
        extracted += e
            .restricted
            .iter()
            .all(|r| is_shuffle_invariant(r, wider).is_ok_and(|v| v.is_invariant())) as usize;
    }
    Ok((
        k6 == 1 << 15 && pentagon_absent && extracted == cases.len(),
        format!(
            "K6 colorings with a triangle {k6}/32768, pentagon absent {pentagon_absent}, extractions {extracted}/{}",
            cases.len()
        ),
    ))
}

fn reduction_facts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    for _ in 0..100 {
        let tree = random_tree(&mut rng, 3, 8);
        let w = flatten_protocol(&tree)?;
        let mut same = true;
        for x in 0..8 {
            for y in 0..8 {
                same &= eval_protocol(&tree, x, y)?.0 == w.evaluate(x, y);
            }
        }
        agree += same as usize;
    }
    let ehd21 = is_blocky(&gen_ehd(2, 1)?).is_some();
    let ehd31 = is_blocky(&gen_ehd(3, 1)?).is_none();
    let none = search_reduction(&gen_ehd(3, 1)?, &BlockyEnumerator, 1, SearchOptions::default())?.is_none();
    Ok((
        agree == 100 && ehd21 && ehd31 && none,
        format!(
            "flatten agrees {agree}/100, EHD_1^2 blocky {ehd21}, EHD_1^3 not blocky {ehd31}, no one-query reduction for EHD_1^3 {none}"
        ),
    ))
}

fn tight_witnesses() -> Result<Vec<(BitMatrix, ReductionWitness)>> {
    let mut out = Vec::new();
    for n in 1..=4 {
        let eq = gen_equality(n)?;
        let w = search_reduction(&eq, &BlockyEnumerator, 1, SearchOptions::default())?.expect("equality is blocky");
        out.push((eq, w));
    }
    let ehd = gen_ehd(2, 1)?;
    let w = search_reduction(&ehd, &BlockyEnumerator, 1, SearchOptions::default())?.expect("EHD_1^2 is blocky");
    out.push((ehd, w));
    // equality on two bits as the AND of two per-bit equalities
    let bit = |b: usize| BlockyLabeling {
        rows: (0..4).map(|x| Some(x >> b & 1)).collect(),
        cols: (0..4).map(|y| Some(y >> b & 1)).collect(),
    };
    let q1 = bit(1).to_matrix();
    let q2 = bit(0).to_matrix();
    debug_assert!(BlockyEnumerator.contains(&q1));
    out.push((
        gen_equality(2)?,
        ReductionWitness::new(vec![q1, q2], vec![false, false, false, true])?,
    ));
    Ok(out)
}

fn mutation_sensitivity() -> Outcome {
    let g = gen_ehd2_gadget().matrix;
    let (mut caught, mut total) = (0, 0);
    for r in 0..g.rows() {
        for c in 0..g.cols() {
            let options: Vec<Option<bool>> = match g.get(r, c) {
                Some(v) => vec![Some(!v)],
                None => vec![Some(false), Some(true)],
            };
            for new in options {
                let mut m = g.clone();
                m.set(r, c, new);
                total += 1;
                caught += !verify_two_tally(&m, 2)?.passes() as usize;
            }
        }
    }
    let (mut f_caught, mut f_total) = (0, 0);
    for (target, w) in tight_witnesses()? {
        if !verify_witness(&target, &w)? {
            return Ok((false, "a reference witness does not verify".into()));
        }
        for i in 0..w.f.len() {
            let mut bad = w.clone();
            bad.f[i] = !bad.f[i];
            f_total += 1;
            f_caught += !verify_witness(&target, &bad)? as usize;
        }
    }
    Ok((
        caught == total && f_caught == f_total,
        format!("gadget mutations caught {caught}/{total}, truth-table mutations caught {f_caught}/{f_total}"),
    ))
}
