//! `ashg`: solve, verify, generate and decompose hedonic game instances.
//!
//! Exit codes: 0 = SOME / stable, 1 = NONE / unstable, 2 = UNKNOWN (signature
//! or enumeration cap hit, dynamics did not converge), 3 = input error.

mod gen;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hedonic_core::coloring::{coloring_to_partition, solve_nash_via_coloring_with_stats};
use hedonic_core::dp::DEFAULT_SIGNATURE_CAP;
use hedonic_core::format::{
    parse_decomposition, parse_instance, parse_partition, write_decomposition, write_partition,
};
use hedonic_core::game::disconnected_coalition;
use hedonic_core::oracle::{
    brute_force_connected_nash_capped, brute_force_nash_capped, brute_force_stable_coloring_capped,
    DEFAULT_PARTITION_CAP,
};
use hedonic_core::{
    better_response_dynamics, heuristic_decompose, make_nice, nash_deviation, run_connected_dp, AshgInstance,
    Heuristic, Partition, Schedule, SolverConfig, TreeDecomposition,
};

use report::{classify, Answer, RunReport, EXIT_INPUT, EXIT_NONE, EXIT_RESOURCE, EXIT_SOME};

#[derive(Parser)]
#[command(name = "ashg", version, about = "Nash stability for additively separable hedonic games")]
#[command(after_help = "Exit codes: 0 SOME/stable, 1 NONE/unstable, 2 UNKNOWN (resource limit), 3 input error.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a Nash stable partition exists and write one if so.
    Solve(SolveArgs),
    /// Check a partition for Nash stability (and optionally connectivity).
    Verify(VerifyArgs),
    /// Generate instances from the hardness reductions or at random.
    #[command(subcommand)]
    Gen(gen::GenCommand),
    /// Exhaustive search over all partitions of a small instance.
    Oracle(OracleArgs),
    /// Write a heuristic tree decomposition of the underlying graph.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Nash,
    ConnectedNash,
    Dynamics,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum HeuristicArg {
    #[default]
    MinDegree,
    MinFill,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::MinDegree => Heuristic::MinDegree,
            HeuristicArg::MinFill => Heuristic::MinFill,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Best,
    First,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (`p ashg` format).
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "nash")]
    mode: Mode,
    /// Tree decomposition of the instance; computed heuristically if absent.
    #[arg(long)]
    td: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "min-degree")]
    heuristic: HeuristicArg,
    /// Partition output file; stdout if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Worker threads for the DP; more than one enables subtree parallelism.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Largest signature table allowed at any node.
    #[arg(long, default_value_t = DEFAULT_SIGNATURE_CAP)]
    cap: usize,
    /// Move budget for `--mode dynamics`.
    #[arg(long, default_value_t = 100_000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "best")]
    schedule: ScheduleArg,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    partition: PathBuf,
    /// Also require every coalition to induce a connected subgraph.
    #[arg(long)]
    connected: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleMode {
    Nash,
    ConnectedNash,
    Coloring,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "nash")]
    mode: OracleMode,
    /// Color budget for `--mode coloring`.
    #[arg(long, default_value_t = 2)]
    colors: usize,
    /// Largest vertex count to enumerate.
    #[arg(long, default_value_t = DEFAULT_PARTITION_CAP)]
    cap: usize,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "min-degree")]
    heuristic: HeuristicArg,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

pub(crate) fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub(crate) fn load_instance(path: &Path) -> Result<AshgInstance> {
    parse_instance(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Writes to `path`, or to stdout when there is none.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_decomposition(path: &Path, instance: &AshgInstance) -> Result<TreeDecomposition> {
    let (td, n) = parse_decomposition(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if n != instance.n() {
        bail!("decomposition is for {n} vertices but the instance has {}", instance.n());
    }
    Ok(td)
}

pub(crate) fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map_or_else(String::new, |p| p.get_name().to_string())
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().context("cannot start worker pool")?;
    Ok(pool.install(f))
}

/// Reports a resource error as UNKNOWN; other errors propagate.
fn unknown_on_resource(err: anyhow::Error, report: RunReport) -> Result<u8> {
    if classify(&err) == EXIT_RESOURCE {
        eprintln!("error: {err:#}");
        report.answer(Answer::Unknown).detail(format!("{err:#}")).emit();
        Ok(EXIT_RESOURCE)
    } else {
        Err(err)
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let started = Instant::now();
    let instance = load_instance(&args.instance)?;
    if args.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let td = match &args.td {
        Some(p) => load_decomposition(p, &instance)?,
        None => heuristic_decompose(&instance, args.heuristic.into()),
    };
    let cfg = SolverConfig { signature_cap: args.cap, parallel: args.workers > 1 };
    let command = format!("solve {}", value_name(&args.mode));

    let outcome: Result<(Option<Partition>, Option<usize>)> = match args.mode {
        Mode::Nash => in_pool(args.workers, || solve_nash_via_coloring_with_stats(&instance, &td, &cfg))?
            .map(|(p, s)| (p, Some(s.peak_table_size)))
            .map_err(Into::into),
        Mode::ConnectedNash => {
            td.ensure_valid(&instance)?;
            let ntd = make_nice(&td)?;
            in_pool(args.workers, || run_connected_dp(&instance, &ntd, &cfg))?
                .map(|run| (run.partition().cloned(), Some(run.stats().peak_table_size)))
                .map_err(Into::into)
        }
        Mode::Dynamics => {
            let schedule = match args.schedule {
                ScheduleArg::Best => Schedule::BestImprovement,
                ScheduleArg::First => Schedule::FirstImprovement,
            };
            Ok((better_response_dynamics(&instance, args.max_steps, schedule), None))
        }
    };
    let mut report = RunReport::new(&command, &instance, started).width(td.width());
    let (found, peak) = match outcome {
        Ok(x) => x,
        Err(e) => return unknown_on_resource(e, report),
    };
    if let Some(p) = peak {
        report = report.peak(p);
    }
    let code = match (&found, args.mode) {
        (Some(p), _) => {
            emit(args.out.as_deref(), &write_partition(p))?;
            report = report.answer(Answer::Some);
            EXIT_SOME
        }
        (None, Mode::Dynamics) => {
            report = report
                .answer(Answer::Unknown)
                .detail(format!("dynamics did not converge within {} moves", args.max_steps));
            EXIT_RESOURCE
        }
        (None, _) => {
            report = report.answer(Answer::None);
            EXIT_NONE
        }
    };
    report.emit();
    Ok(code)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let started = Instant::now();
    let instance = load_instance(&args.instance)?;
    let partition =
        parse_partition(&read(&args.partition)?).with_context(|| format!("in {}", args.partition.display()))?;
    let deviation = nash_deviation(&instance, &partition)?;
    let split = if args.connected { disconnected_coalition(&instance, &partition)? } else { None };
    let report = RunReport::new("verify", &instance, started);
    if let Some(w) = deviation {
        println!("unstable: {w}");
        report.answer(Answer::None).detail(w.to_string()).emit();
        return Ok(EXIT_NONE);
    }
    if let Some(c) = split {
        let members: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
        let msg = format!("coalition {{{}}} is not connected", members.join(","));
        println!("unstable: {msg}");
        report.answer(Answer::None).detail(msg).emit();
        return Ok(EXIT_NONE);
    }
    println!("stable");
    report.answer(Answer::Some).emit();
    Ok(EXIT_SOME)
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8> {
    let started = Instant::now();
    let instance = load_instance(&args.instance)?;
    let found = match args.mode {
        OracleMode::Nash => brute_force_nash_capped(&instance, args.cap),
        OracleMode::ConnectedNash => brute_force_connected_nash_capped(&instance, args.cap),
        OracleMode::Coloring => brute_force_stable_coloring_capped(&instance, args.colors, args.cap)
            .map(|c| c.as_ref().map(coloring_to_partition)),
    };
    let command = format!("oracle {}", value_name(&args.mode));
    let report = RunReport::new(&command, &instance, started);
    match found {
        Err(e) => unknown_on_resource(e.into(), report),
        Ok(Some(p)) => {
            emit(args.out.as_deref(), &write_partition(&p))?;
            report.answer(Answer::Some).emit();
            Ok(EXIT_SOME)
        }
        Ok(None) => {
            report.answer(Answer::None).emit();
            Ok(EXIT_NONE)
        }
    }
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<u8> {
    let started = Instant::now();
    let instance = load_instance(&args.instance)?;
    let td = heuristic_decompose(&instance, args.heuristic.into());
    emit(args.out.as_deref(), &write_decomposition(&td, instance.n()))?;
    RunReport::new("decompose", &instance, started).width(td.width()).answer(Answer::Some).emit();
    Ok(EXIT_SOME)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(g) => gen::run(g),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Decompose(a) => cmd_decompose(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_SOME };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}
