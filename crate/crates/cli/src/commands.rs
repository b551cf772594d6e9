use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qslab::acceptance::{run_criterion, TITLES};
use qslab::domino::{delta_type, is_shuffle_invariant, verify_two_tally, DominoSet, ShuffleVerdict};
use qslab::matrix::contains_pattern;
use qslab::problems::ProblemSpec;
use qslab::protocol::{
    bounded_diameter_threshold, check_partition, diameter_partition, eq_gt_protocol, naive_thd_protocol,
    partition_threshold, sweep as run_sweep, SweepConfig, SweepProtocol, SweepRow, ThresholdDistance, Transcript,
};
use qslab::ramsey::{find_homogeneous, SubsetColoring};
use qslab::reduction::{
    is_blocky, search_reduction, verify_witness, BlockyEnumerator, ReductionWitness, SearchOptions,
};
use qslab::structure::{max_gt_size, vc_dimension};
use qslab::{BitMatrix, BitString, PartialMatrix};

use crate::{
    read_file, AcceptArgs, AnalyzeArgs, CheckCmd, DominoCmd, GenProblem, Outcome, RamseyCmd, ReduceCmd, RunProtocol,
    SweepArgs, SweepKind,
};

fn read_matrix(path: &Path) -> Result<BitMatrix> {
    read_file(path)?
        .parse()
        .with_context(|| format!("parsing {}", path.display()))
}

fn read_partial(path: &Path) -> Result<PartialMatrix> {
    read_file(path)?
        .parse()
        .with_context(|| format!("parsing {}", path.display()))
}

/// A set file is a matrix whose rows are the strings; a bare list of
/// bitstrings, one per line, is accepted too.
fn read_set(path: &Path) -> Result<Vec<BitString>> {
    let text = read_file(path)?;
    if let Ok(m) = text.parse::<BitMatrix>() {
        return Ok(m.row_vectors().to_vec());
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<BitString>()
                .with_context(|| format!("{}: bad string {l:?}", path.display()))
        })
        .collect()
}

fn bits(s: &str) -> Result<BitString> {
    s.parse().with_context(|| format!("bad bitstring {s:?}"))
}

fn delta(s: &str) -> Result<DominoSet> {
    s.parse().with_context(|| format!("bad domino set {s:?}"))
}

pub fn gen(problem: &GenProblem) -> Result<Outcome> {
    let spec = match *problem {
        GenProblem::Equality { n } => ProblemSpec::Equality { n },
        GenProblem::Gt { t } => ProblemSpec::GreaterThan { t },
        GenProblem::Ehd { n, k } => ProblemSpec::ExactHamming { n, k },
        GenProblem::Thd { n, k } => ProblemSpec::ThresholdHamming { n, k },
        GenProblem::Iip { d, n } => ProblemSpec::IntegerInnerProduct { d, n },
        GenProblem::Shattered { k } => ProblemSpec::ShatteredTwoTally { k },
        GenProblem::Gadget => ProblemSpec::Ehd2Gadget,
    };
    Ok(Outcome::ok(spec.build()?.to_string()))
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Outcome> {
    let m = read_matrix(&a.matrix)?;
    let vc = vc_dimension(&m, a.vc_cap, a.budget)?;
    let gt = max_gt_size(&m, a.gt_cap, a.budget)?;
    let blocky = is_blocky(&m);
    let capped = |v: usize, c: bool| if c { format!(">={v}") } else { v.to_string() };
    let mut s = String::new();
    if a.csv {
        writeln!(s, "rows,cols,ones,vc,max_gt,max_negated_gt,blocky_labels")?;
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            m.rows(),
            m.cols(),
            m.count_ones(),
            capped(vc, vc >= a.vc_cap),
            capped(gt.max_gt, gt.gt_capped),
            capped(gt.max_negated_gt, gt.negated_capped),
            blocky.as_ref().map_or(String::new(), |b| b.num_labels().to_string())
        )?;
    } else {
        writeln!(s, "shape: {}x{}", m.rows(), m.cols())?;
        writeln!(s, "ones: {}", m.count_ones())?;
        writeln!(s, "vc_dimension: {}", capped(vc, vc >= a.vc_cap))?;
        writeln!(s, "max_gt: {}", capped(gt.max_gt, gt.gt_capped))?;
        writeln!(s, "max_negated_gt: {}", capped(gt.max_negated_gt, gt.negated_capped))?;
        match blocky {
            Some(b) => writeln!(s, "blocky: yes ({} blocks)", b.num_labels())?,
            None => writeln!(s, "blocky: no")?,
        }
    }
    Ok(Outcome::ok(s))
}

pub fn domino(cmd: &DominoCmd) -> Result<Outcome> {
    match cmd {
        DominoCmd::Type { x, y, delta: d } => {
            let t = delta_type(&bits(x)?, &bits(y)?, delta(d)?)?;
            Ok(Outcome::ok(format!("{t}\n")))
        }
    }
}

fn set_line(set: &[usize]) -> String {
    set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn check(cmd: &CheckCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        CheckCmd::Invariance { matrix, delta: d } => {
            let d = delta(d)?;
            Ok(match is_shuffle_invariant(&read_matrix(matrix)?, d)? {
                ShuffleVerdict::Invariant => Outcome::ok(format!("invariant for {d}\n")),
                ShuffleVerdict::Violation { x, y, u, v } => Outcome {
                    text: format!("not invariant for {d}\n{x}\n{y}\n{u}\n{v}\n"),
                    failed: true,
                },
            })
        }
        CheckCmd::TwoTally { matrix, k } => {
            let report = verify_two_tally(&read_partial(matrix)?, *k)?;
            let mut s = format!(
                "agrees_with_ehd: {}\nshared_tallies: {}\n",
                report.agrees_with_ehd, report.shared_tallies
            );
            if let Some(v) = &report.first_violation {
                writeln!(s, "violation: {v:?}")?;
            }
            Ok(Outcome {
                text: s,
                failed: !report.passes(),
            })
        }
        CheckCmd::Pattern {
            host,
            pattern,
            distinct,
            budget,
        } => {
            let found = contains_pattern(&read_matrix(host)?, &read_partial(pattern)?, *distinct, *budget)?;
            Ok(match found {
                Some(e) => Outcome::ok(format!("rows: {}\ncols: {}\n", set_line(&e.rows), set_line(&e.cols))),
                None => Outcome {
                    text: "NONE\n".into(),
                    failed: true,
                },
            })
        }
        CheckCmd::Partition { set, tries } => {
            let z = read_set(set)?;
            let p = diameter_partition(&z, seed, *tries)?;
            let valid = check_partition(&z, &p.a, &p.b);
            Ok(Outcome {
                text: format!(
                    "threshold: {:.3}\ntries: {}\nA: {}\nB: {}\nvalid: {valid}\n",
                    partition_threshold(z.len()),
                    p.tries,
                    set_line(&p.a),
                    set_line(&p.b)
                ),
                failed: !valid,
            })
        }
    }
}

fn protocol_output(out: impl std::fmt::Display, t: &Transcript, with_transcript: bool) -> Outcome {
    let mut s = format!("{out}, queries={}\n", t.queries());
    if with_transcript {
        s.push_str(&t.to_string());
    }
    Outcome::ok(s)
}

pub fn run(protocol: &RunProtocol, seed: u64) -> Result<Outcome> {
    match protocol {
        RunProtocol::EqGt { n, i, j, common } => {
            let (out, t) = eq_gt_protocol(*n, *i, *j)?;
            Ok(protocol_output(out as u8, &t, common.transcript))
        }
        RunProtocol::Naive { x, y, k, common } => {
            let (out, t) = naive_thd_protocol(&bits(x)?, &bits(y)?, *k)?;
            Ok(protocol_output(out, &t, common.transcript))
        }
        RunProtocol::Bounded { sets, x, y, k, common } => {
            let z = read_set(sets)?;
            let (out, t) = bounded_diameter_threshold(&z, &bits(x)?, &bits(y)?, *k)?;
            Ok(protocol_output(out, &t, common.transcript))
        }
        RunProtocol::ThresholdDistance {
            sets,
            x_set,
            y_set,
            x,
            y,
            k,
            tries,
            common,
        } => {
            let (xs, ys) = match (sets, x_set, y_set) {
                (Some(z), _, _) => {
                    let z = read_set(z)?;
                    (z.clone(), z)
                }
                (None, Some(a), Some(b)) => (read_set(a)?, read_set(b)?),
                _ => bail!("give --sets, or both --x-set and --y-set"),
            };
            let td = ThresholdDistance::with_tries(&xs, &ys, seed, *tries)?;
            let (out, t) = td.run(&bits(x)?, &bits(y)?, *k)?;
            Ok(protocol_output(out, &t, common.transcript))
        }
    }
}

pub fn sweep(a: &SweepArgs, seed: u64, verbose: u8) -> Result<Outcome> {
    let protocol = match a.protocol {
        SweepKind::ThresholdDistance => SweepProtocol::ThresholdDistance,
        SweepKind::Naive => SweepProtocol::Naive,
    };
    let mut s = format!("{}\n", SweepRow::CSV_HEADER);
    for &n in &a.n {
        for &d in &a.d {
            let start = Instant::now();
            let mut config = SweepConfig::new(n, d, a.trials, seed);
            config.spread = a.spread;
            for row in run_sweep(protocol, &config, &a.k)? {
                writeln!(s, "{}", row.csv())?;
            }
            if verbose > 0 {
                eprintln!("N={n} d={d}: {:.1}s", start.elapsed().as_secs_f64());
            }
        }
    }
    Ok(Outcome::ok(s))
}

pub fn ramsey(cmd: &RamseyCmd) -> Result<Outcome> {
    match cmd {
        RamseyCmd::Find {
            coloring,
            sigma,
            budget,
        } => {
            let c: SubsetColoring = read_file(coloring)?
                .parse()
                .with_context(|| format!("parsing {}", coloring.display()))?;
            Ok(Outcome::ok(match find_homogeneous(&c, *sigma, *budget)? {
                Some(t) => format!("{}\n", set_line(&t)),
                None => "NONE\n".into(),
            }))
        }
    }
}

pub fn reduce(cmd: &ReduceCmd) -> Result<Outcome> {
    match cmd {
        ReduceCmd::Search { target, c, budget } => {
            let options = SearchOptions {
                budget: *budget,
                allow_pairs: true,
            };
            let found = search_reduction(&read_matrix(target)?, &BlockyEnumerator, *c, options)?;
            Ok(Outcome::ok(match found {
                Some(w) => w.to_string(),
                None => "NONE\n".into(),
            }))
        }
        ReduceCmd::Verify { target, witness } => {
            let w: ReductionWitness = read_file(witness)?
                .parse()
                .with_context(|| format!("parsing {}", witness.display()))?;
            let valid = verify_witness(&read_matrix(target)?, &w)?;
            Ok(Outcome {
                text: format!("{}\n", if valid { "valid" } else { "invalid" }),
                failed: !valid,
            })
        }
    }
}

pub fn accept(a: &AcceptArgs, verbose: u8) -> Result<Outcome> {
    let ids: Vec<usize> = if a.only.is_empty() {
        (1..=TITLES.len()).collect()
    } else {
        a.only.clone()
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > TITLES.len()) {
        bail!("no criterion {bad}; valid ids are 1..={}", TITLES.len());
    }
    let mut s = String::new();
    let mut failed = 0;
    for id in ids.iter().copied() {
        let report = run_criterion(id);
        if verbose > 0 {
            eprintln!("{}", report.line());
        }
        failed += usize::from(!report.passed);
        writeln!(s, "{}", report.line())?;
    }
    writeln!(s, "{} of {} criteria passed", ids.len() - failed, ids.len())?;
    Ok(Outcome {
        text: s,
        failed: failed > 0,
    })
}
