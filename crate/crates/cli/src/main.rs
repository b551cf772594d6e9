use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "qslab",
    version,
    about = "Constructions, oracle protocols and structural checks for constant-cost communication problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// More progress on stderr (repeatable).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a problem matrix in the text format.
    Gen {
        #[command(subcommand)]
        problem: GenProblem,
    },
    /// Structural report for a total matrix.
    Analyze(AnalyzeArgs),
    /// Dominoes and types of string pairs.
    Domino {
        #[command(subcommand)]
        cmd: DominoCmd,
    },
    /// Property checks on matrices and sets.
    Check {
        #[command(subcommand)]
        cmd: CheckCmd,
    },
    /// Run one protocol on one input pair.
    Run {
        #[command(subcommand)]
        protocol: RunProtocol,
    },
    /// Query counts over random clustered instances, as CSV.
    Sweep(SweepArgs),
    /// Homogeneous sets of subset colorings.
    Ramsey {
        #[command(subcommand)]
        cmd: RamseyCmd,
    },
    /// Reductions through Equality-class queries.
    Reduce {
        #[command(subcommand)]
        cmd: ReduceCmd,
    },
    /// Run the acceptance criteria and print a table.
    Accept(AcceptArgs),
}

#[derive(Subcommand, Debug)]
enum GenProblem {
    /// Equality on {0,1}^n.
    Equality {
        #[arg(long)]
        n: usize,
    },
    /// Greater-Than on [t] (1 iff i <= j).
    Gt {
        #[arg(long)]
        t: usize,
    },
    /// Exact Hamming distance k on {0,1}^n.
    Ehd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Hamming distance at most k on {0,1}^n.
    Thd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Integer inner product on {-n..n}^d.
    Iip {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Partial matrix with a shattered set of size k and two tallies.
    Shattered {
        #[arg(long)]
        k: usize,
    },
    /// The 7-bit partial matrix for exact distance 2.
    Gadget,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Matrix file.
    matrix: PathBuf,
    /// Largest VC dimension searched.
    #[arg(long, default_value_t = 8)]
    vc_cap: usize,
    /// Largest Greater-Than size searched.
    #[arg(long, default_value_t = 8)]
    gt_cap: usize,
    #[arg(long, default_value_t = qslab::matrix::DEFAULT_SEARCH_BUDGET)]
    budget: u64,
    /// One CSV line instead of the report.
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand, Debug)]
enum DominoCmd {
    /// Type of (x, y) over the dominoes outside delta.
    Type {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Dominoes to drop: `all`, `none` or a list like `01,10`.
        #[arg(long, default_value = "none")]
        delta: String,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Shuffle invariance of a labeled matrix.
    Invariance {
        matrix: PathBuf,
        #[arg(long, default_value = "all")]
        delta: String,
    },
    /// The two-tally conditions against exact distance k.
    TwoTally {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Search for a partial pattern inside a matrix.
    Pattern {
        host: PathBuf,
        pattern: PathBuf,
        /// Chosen rows and columns must be pairwise distinct vectors.
        #[arg(long)]
        distinct: bool,
        #[arg(long, default_value_t = qslab::matrix::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
    /// Sample a diameter partition of a set.
    Partition {
        set: PathBuf,
        #[arg(long, default_value_t = 16)]
        tries: usize,
    },
}

#[derive(Args, Debug)]
struct RunCommon {
    /// Print every oracle query.
    #[arg(long)]
    transcript: bool,
}

#[derive(Subcommand, Debug)]
enum RunProtocol {
    /// Greater-Than on [n] through Equality queries.
    EqGt {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        j: u64,
        #[command(flatten)]
        common: RunCommon,
    },
    /// Suffix equality then binary search over coordinates.
    Naive {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: RunCommon,
    },
    /// Threshold distance on a set of small diameter.
    Bounded {
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: RunCommon,
    },
    /// Threshold distance over arbitrary sets.
    ThresholdDistance {
        /// Set used for both parties.
        #[arg(long, conflicts_with_all = ["x_set", "y_set"], required_unless_present_all = ["x_set", "y_set"])]
        sets: Option<PathBuf>,
        #[arg(long, requires = "y_set")]
        x_set: Option<PathBuf>,
        #[arg(long, requires = "x_set")]
        y_set: Option<PathBuf>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        k: usize,
        /// Partition samples per recursion level.
        #[arg(long, default_value_t = qslab::protocol::DEFAULT_PARTITION_TRIES)]
        tries: usize,
        #[command(flatten)]
        common: RunCommon,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SweepKind {
    ThresholdDistance,
    Naive,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepKind::ThresholdDistance)]
    protocol: SweepKind,
    /// Set sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// String lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Largest number of bit flips from a cluster center.
    #[arg(long, default_value_t = 2)]
    spread: usize,
}

#[derive(Subcommand, Debug)]
enum RamseyCmd {
    /// Print a homogeneous set of the given size, or NONE.
    Find {
        coloring: PathBuf,
        #[arg(long)]
        sigma: usize,
        #[arg(long, default_value_t = qslab::ramsey::DEFAULT_RAMSEY_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceCmd {
    /// Look for a witness with exactly c blocky queries; prints it or NONE.
    Search {
        target: PathBuf,
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = qslab::reduction::DEFAULT_REDUCTION_BUDGET)]
        budget: u64,
    },
    /// Check a witness against a target; exit 1 when it is not valid.
    Verify { target: PathBuf, witness: PathBuf },
}

#[derive(Args, Debug)]
struct AcceptArgs {
    /// Criteria to run, 1-based.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

/// Report text plus whether the command should exit with status 1.
pub struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failed: false }
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    let v = cli.verbose;
    match &cli.command {
        Command::Gen { problem } => commands::gen(problem),
        Command::Analyze(a) => commands::analyze(a),
        Command::Domino { cmd } => commands::domino(cmd),
        Command::Check { cmd } => commands::check(cmd, seed),
        Command::Run { protocol } => commands::run(protocol, seed),
        Command::Sweep(a) => commands::sweep(a, seed, v),
        Command::Ramsey { cmd } => commands::ramsey(cmd),
        Command::Reduce { cmd } => commands::reduce(cmd),
        Command::Accept(a) => commands::accept(a, v),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qslab::Error>() {
        Some(e) if e.is_budget() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = dispatch(&cli).and_then(|outcome| {
        emit(cli.out.as_deref(), &outcome.text)?;
        Ok(outcome.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
