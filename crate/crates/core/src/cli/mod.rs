//! The `oblivisort` command line: `sort`, `bench`, `verify` and `schedule`.
//!
//! [`run`] takes the argument list and output streams and returns the exit
//! code, so the whole CLI is testable in-process. Exit codes: 0 success, 1
//! verification failure or unsorted result, 2 usage or contract error.

mod fit;
mod record;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

pub use fit::{loglog_slope, SlopeFit};
pub use record::{ExperimentRecord, CSV_HEADER};

use crate::algorithms::{
    annealing_sort, bubble_sort, default_spin_budget, guess_sort, spin_the_bottle_sort, SortReport,
    TerminationMode,
};
use crate::element::{tag, TaggedElement};
use crate::error::{Error, Result};
use crate::metrics::{adversarial_input, random_permutation, reverse_input, sorted_input};
use crate::rng::{entropy_seed, trial_seed, RngStream, INPUT_STREAM};
use crate::schedule::{practical_preset, theoretical_schedule, AnnealingSchedule, ScheduleParams};
use crate::trace::{
    obliviousness_check, verify_zero_one_capped, AlgoConfig, Trace, DEFAULT_WIRE_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable consulted when `--seed` is omitted.
pub const SEED_ENV: &str = "OBLIVISORT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "oblivisort",
    version,
    about = "Randomized data-oblivious sorting experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one sort and print its record.
    Sort(SortArgs),
    /// Run many trials over several sizes and print one record per trial.
    Bench(BenchArgs),
    /// Certify a trace file, or check that an algorithm is data oblivious.
    Verify(VerifyArgs),
    /// Print an annealing schedule in the schedule file format.
    Schedule(ScheduleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Spin,
    Anneal,
    Guess,
    Bubble,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Spin => "spin",
            Algo::Anneal => "anneal",
            Algo::Guess => "guess",
            Algo::Bubble => "bubble",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputKind {
    Random,
    Adversarial,
    Reverse,
    Sorted,
}

#[derive(Debug, Args)]
struct AlgoArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Master seed; falls back to $OBLIVISORT_SEED, then OS entropy.
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    /// Schedule for anneal: preset:practical, preset:theoretical or a file.
    #[arg(long, default_value = "preset:practical")]
    schedule: String,
    /// Round budget for spin (fixed-budget mode) or comparison budget for
    /// guess.
    #[arg(long)]
    budget: Option<u64>,
    /// Run spin with the default fixed round budget.
    #[arg(long)]
    oblivious: bool,
}

#[derive(Debug, Args)]
struct SortArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long)]
    n: Option<usize>,
    /// Keys, one integer per line; overrides --input-kind.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "random")]
    input_kind: InputKind,
    /// Write the compare-exchange trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, value_enum, default_value = "random")]
    input_kind: InputKind,
    /// Also fit log(mean comparisons) against log n.
    #[arg(long)]
    fit: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Trace file to certify over all 0-1 inputs.
    #[arg(long, conflicts_with_all = ["algo", "n", "inputs"])]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WIRE_CAP)]
    cap: usize,
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of random inputs for the obliviousness check.
    #[arg(long, default_value_t = 10)]
    inputs: usize,
    #[arg(long, default_value = "preset:practical")]
    schedule: String,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    oblivious: bool,
}

#[derive(Debug, Args)]
struct ScheduleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "preset:practical")]
    schedule: String,
}

/// A usage or contract problem; reported on stderr with exit code 2.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<std::io::Error> for Usage {
    fn from(e: std::io::Error) -> Self {
        Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Usage>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Sort(args) => cmd_sort(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Schedule(args) => cmd_schedule(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

/// How an anneal run picks its schedule.
#[derive(Clone, Debug)]
enum ScheduleSource {
    Practical,
    Theoretical,
    File(PathBuf, AnnealingSchedule),
}

impl ScheduleSource {
    fn parse(spec: &str) -> std::result::Result<Self, Usage> {
        match spec {
            "preset:practical" => Ok(Self::Practical),
            "preset:theoretical" => Ok(Self::Theoretical),
            other if other.starts_with("preset:") => {
                Err(Usage(format!("unknown schedule preset {other:?}")))
            }
            path => {
                let file = File::open(path)
                    .map_err(|e| Usage(format!("cannot open schedule {path:?}: {e}")))?;
                let schedule = AnnealingSchedule::read(BufReader::new(file))
                    .map_err(|e| Usage(format!("schedule {path:?}: {e}")))?;
                Ok(Self::File(PathBuf::from(path), schedule))
            }
        }
    }

    fn id(&self) -> String {
        match self {
            Self::Practical => "practical".into(),
            Self::Theoretical => "theoretical".into(),
            Self::File(path, _) => format!("file:{}", path.display()),
        }
    }

    fn for_size(&self, n: usize) -> Result<AnnealingSchedule> {
        if n < 2 {
            if let Self::File(_, s) = self {
                return Ok(s.clone());
            }
            return Ok(AnnealingSchedule::terminator_only());
        }
        match self {
            Self::Practical => practical_preset(n),
            Self::Theoretical => theoretical_schedule(n, ScheduleParams::default()),
            Self::File(_, s) => Ok(s.clone()),
        }
    }
}

/// Everything needed to run one trial, resolved from the flags once.
struct Runner {
    algo: Algo,
    schedule: Option<ScheduleSource>,
    budget: Option<u64>,
    oblivious: bool,
}

impl Runner {
    fn new(args: &AlgoArgs) -> std::result::Result<Self, Usage> {
        Self::build(args.algo, &args.schedule, args.budget, args.oblivious)
    }

    fn build(
        algo: Algo,
        schedule: &str,
        budget: Option<u64>,
        oblivious: bool,
    ) -> std::result::Result<Self, Usage> {
        let schedule = match algo {
            Algo::Anneal => Some(ScheduleSource::parse(schedule)?),
            _ => None,
        };
        Ok(Self {
            algo,
            schedule,
            budget,
            oblivious,
        })
    }

    fn schedule_id(&self) -> Option<String> {
        self.schedule.as_ref().map(ScheduleSource::id)
    }

    fn spin_mode(&self, n: usize) -> TerminationMode {
        match (self.budget, self.oblivious) {
            (Some(rounds), _) => TerminationMode::FixedBudget(rounds),
            (None, true) => TerminationMode::FixedBudget(default_spin_budget(n)),
            (None, false) => TerminationMode::CheckSorted,
        }
    }

    fn oblivious_config(&self, n: usize) -> Result<AlgoConfig> {
        match self.algo {
            Algo::Spin => Ok(AlgoConfig::SpinTheBottle(self.spin_mode(n))),
            Algo::Anneal => Ok(AlgoConfig::Annealing(
                self.schedule
                    .as_ref()
                    .expect("anneal has a schedule")
                    .for_size(n)?,
            )),
            other => Err(Error::InvalidParameter(format!(
                "{} is not a data-oblivious algorithm",
                other.name()
            ))),
        }
    }

    fn sort(
        &self,
        array: &mut [TaggedElement],
        seed: u64,
        recorder: Option<&mut Trace>,
    ) -> Result<SortReport> {
        let n = array.len();
        let mut rng = RngStream::new(seed);
        match self.algo {
            Algo::Spin => spin_the_bottle_sort(array, &mut rng, self.spin_mode(n), recorder),
            Algo::Anneal => {
                let schedule = self
                    .schedule
                    .as_ref()
                    .expect("anneal has a schedule")
                    .for_size(n)?;
                annealing_sort(array, &schedule, &mut rng, recorder)
            }
            Algo::Guess => {
                if n < 2 {
                    return Ok(bubble_sort(array));
                }
                let budget = self.budget.unwrap_or_else(|| default_guess_budget(n));
                guess_sort(array, &mut rng, budget)
            }
            Algo::Bubble => Ok(bubble_sort(array)),
        }
    }

    fn trial(
        &self,
        array: &mut [TaggedElement],
        seed: u64,
        recorder: Option<&mut Trace>,
    ) -> Result<ExperimentRecord> {
        let start = Instant::now();
        let report = self.sort(array, seed, recorder)?;
        let wall_ns = start.elapsed().as_nanos() as u64;
        Ok(ExperimentRecord::from_report(
            self.algo.name(),
            seed,
            self.schedule_id(),
            &report,
            wall_ns,
        ))
    }
}

/// Comparison budget for guess sort when none is given.
pub fn default_guess_budget(n: usize) -> u64 {
    let n = n as u64;
    let log = 64 - n.leading_zeros() as u64;
    16 * n * n * (log + 1)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(entropy_seed)
}

fn generate_input(kind: InputKind, n: usize, seed: u64) -> Result<Vec<TaggedElement>> {
    match kind {
        InputKind::Random => Ok(random_permutation(
            n,
            &mut RngStream::derive(seed, INPUT_STREAM),
        )),
        InputKind::Adversarial => adversarial_input(n),
        InputKind::Reverse => Ok(reverse_input(n)),
        InputKind::Sorted => Ok(sorted_input(n)),
    }
}

fn read_keys(path: &Path) -> std::result::Result<Vec<i64>, Usage> {
    let file = File::open(path).map_err(|e| Usage(format!("cannot open {path:?}: {e}")))?;
    let mut keys = Vec::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let key = text.parse::<i64>().map_err(|e| {
            Usage(format!(
                "{}:{}: bad key {text:?}: {e}",
                path.display(),
                index + 1
            ))
        })?;
        keys.push(key);
    }
    Ok(keys)
}

fn cmd_sort(args: &SortArgs, out: &mut dyn Write) -> CmdResult {
    let runner = Runner::new(&args.algo)?;
    let seed = resolve_seed(args.algo.seed);
    let mut array = match &args.input {
        Some(path) => {
            let keys = read_keys(path)?;
            if let Some(n) = args.n.filter(|&n| n != keys.len()) {
                return Err(Usage(format!(
                    "--n {n} disagrees with {} keys in {}",
                    keys.len(),
                    path.display()
                )));
            }
            tag(&keys)
        }
        None => {
            let n = args
                .n
                .ok_or_else(|| Usage("--n or --input is required".into()))?;
            generate_input(args.input_kind, n, seed)?
        }
    };
    if array.is_empty() {
        return Err(Usage("n must be at least 1".into()));
    }

    let mut trace = args.trace.as_ref().map(|_| Trace::new(array.len()));
    let record = runner.trial(&mut array, seed, trace.as_mut())?;
    if let (Some(path), Some(trace)) = (&args.trace, &trace) {
        let file = File::create(path).map_err(|e| Usage(format!("cannot write {path:?}: {e}")))?;
        let mut w = BufWriter::new(file);
        trace.write(&mut w)?;
        w.flush()?;
    }
    if !args.json {
        writeln!(out, "{CSV_HEADER}")?;
    }
    record.write(out, args.json)?;
    Ok(if record.sorted { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CmdResult {
    let runner = Runner::new(&args.algo)?;
    if args.sizes.iter().any(|&n| n < 1) {
        return Err(Usage("sizes must be at least 1".into()));
    }
    if args.fit {
        let mut distinct = args.sizes.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(Usage("--fit needs at least 3 distinct sizes".into()));
        }
    }
    if args.input_kind == InputKind::Adversarial {
        if let Some(n) = args.sizes.iter().find(|&&n| n % 2 != 0) {
            return Err(Usage(format!(
                "adversarial input needs even sizes, got {n}"
            )));
        }
    }
    let master = resolve_seed(args.algo.seed);

    let jobs: Vec<(usize, u64)> = args
        .sizes
        .iter()
        .flat_map(|&n| (0..args.trials).map(move |t| (n, t)))
        .collect();
    let records: Vec<ExperimentRecord> = jobs
        .par_iter()
        .map(|&(n, t)| {
            let seed = trial_seed(master, n, t);
            let mut array = generate_input(args.input_kind, n, seed)?;
            runner.trial(&mut array, seed, None)
        })
        .collect::<Result<_>>()?;

    if !args.json {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for record in &records {
        record.write(out, args.json)?;
    }
    if args.fit {
        let fit = fit_mean_comparisons(&records)?;
        if args.json {
            let line = serde_json::json!({ "fit": fit });
            writeln!(out, "{line}")?;
        } else {
            writeln!(
                out,
                "# fit slope={:.6} intercept={:.6} r_squared={:.6}",
                fit.slope, fit.intercept, fit.r_squared
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// Log-log fit of per-size mean comparisons.
pub fn fit_mean_comparisons(records: &[ExperimentRecord]) -> Result<SlopeFit> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| {
            let runs: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.comparisons as f64)
                .collect();
            (n as f64, runs.iter().sum::<f64>() / runs.len() as f64)
        })
        .collect();
    loglog_slope(&points)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if let Some(path) = &args.trace {
        let file = File::open(path).map_err(|e| Usage(format!("cannot open {path:?}: {e}")))?;
        let trace = Trace::read(BufReader::new(file))?;
        let verdict = verify_zero_one_capped(&trace, args.cap)?;
        return Ok(match verdict.counterexample {
            None => {
                writeln!(
                    out,
                    "certified: {} wires, {} ops",
                    trace.wires(),
                    trace.len()
                )?;
                EXIT_OK
            }
            Some(bits) => {
                let text: Vec<String> = bits.iter().map(u8::to_string).collect();
                writeln!(out, "not certified; counterexample: {}", text.join(" "))?;
                EXIT_FAILED
            }
        });
    }

    let algo = args
        .algo
        .ok_or_else(|| Usage("verify needs --trace FILE or --algo with --n".into()))?;
    let n = args
        .n
        .ok_or_else(|| Usage("--n is required with --algo".into()))?;
    if n < 1 || args.inputs < 1 {
        return Err(Usage("--n and --inputs must be at least 1".into()));
    }
    let runner = Runner::build(algo, &args.schedule, args.budget, args.oblivious)?;
    let config = runner.oblivious_config(n)?;
    let seed = resolve_seed(args.seed);
    let inputs: Vec<Vec<TaggedElement>> = (0..args.inputs as u64)
        .map(|k| random_permutation(n, &mut RngStream::derive(seed, INPUT_STREAM + k)))
        .collect();
    let verdict = obliviousness_check(&config, seed, &inputs)?;
    Ok(match verdict.first_mismatch {
        None => {
            writeln!(
                out,
                "identical: {} inputs, {} ops each",
                inputs.len(),
                verdict.trace_len
            )?;
            EXIT_OK
        }
        Some((input, gate)) => {
            writeln!(
                out,
                "traces differ: input {input} diverges at op {}",
                gate + 1
            )?;
            EXIT_FAILED
        }
    })
}

fn cmd_schedule(args: &ScheduleArgs, out: &mut dyn Write) -> CmdResult {
    let source = ScheduleSource::parse(&args.schedule)?;
    let schedule = source.for_size(args.n)?;
    schedule.write(&mut *out)?;
    Ok(EXIT_OK)
}
