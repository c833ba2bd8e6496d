//! `eot` command-line front end.
//!
//! Exit codes: 0 on success, 1 on invalid input (bad flags, unreadable or
//! malformed files, solver validation errors), 2 when a solver hit its
//! iteration cap before reaching the requested accuracy.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use eot_bench::{
    exact_ot_small, image_pair, image_pair_to_problem, run_batch_experiment, run_eps_experiment,
    run_scaling_experiment, write_csv, Accuracy, Algo, ExperimentRecord, RunOptions,
};
use eot_core::io::ProblemFile;
use eot_core::sinkhorn::approximate_ot_stochastic_with;
use eot_core::{
    approximate_ot, approximate_ot_sinkhorn, marginal_residual, transport_cost,
    Approximation, NormKind, OpCounter, SolverConfig,
};
use serde::Serialize;

const CLASSICAL_SINKHORN_CAP: usize = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "eot", version, about = "Entropic optimal transport solvers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolveAlgo {
    Pdasmd,
    PdasmdB,
    Sinkhorn,
    StochSinkhorn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Norm {
    L2,
    Linf,
}

#[derive(Debug, clap::Args)]
#[group(required = false, multiple = false)]
struct EpsArg {
    /// Accuracy in cost units.
    #[arg(long)]
    eps: Option<f64>,
    /// Accuracy as a multiple of the largest cost entry.
    #[arg(long)]
    eps_rel: Option<f64>,
}

impl EpsArg {
    fn accuracy(&self, default_rel: f64) -> Accuracy {
        match (self.eps, self.eps_rel) {
            (Some(e), _) => Accuracy::Absolute(e),
            (None, Some(r)) => Accuracy::Relative(r),
            (None, None) => Accuracy::Relative(default_rel),
        }
    }
}

#[derive(Debug, clap::Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5])]
    seeds: Vec<u64>,
    /// Output CSV file; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Parallel worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record wall-clock time per cell (makes output run-dependent).
    #[arg(long)]
    wall_clock: bool,
}

impl BenchArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            jobs: self.jobs,
            wall_clock: self.wall_clock,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic image-pair problem as JSON.
    GenData {
        #[arg(long)]
        side: usize,
        #[arg(long, env = "OT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one problem file to an eps-accurate transport plan.
    Solve {
        #[arg(long, value_enum)]
        algo: SolveAlgo,
        #[arg(long, value_enum, default_value = "linf")]
        norm: Norm,
        #[command(flatten)]
        eps: EpsArg,
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, env = "OT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        problem: PathBuf,
        /// Iteration cap: epochs for PDASMD, sweeps for Sinkhorn, coordinate
        /// updates for stochastic Sinkhorn. Defaults to each solver's own cap.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Output JSON file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operation counts across image sides.
    BenchN {
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
        #[command(flatten)]
        eps: EpsArg,
        #[arg(long, value_delimiter = ',', default_values_t = [String::from("pdasmd_linf")])]
        algos: Vec<String>,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// PDASMD-B operation counts across batch sizes.
    BenchBatch {
        #[arg(long)]
        side: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        batches: Vec<usize>,
        #[command(flatten)]
        eps: EpsArg,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// Operation counts across accuracies.
    BenchEps {
        #[arg(long)]
        side: usize,
        /// Relative accuracies (multiples of the largest cost entry).
        #[arg(long, value_delimiter = ',', required = true)]
        eps_rel: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [String::from("pdasmd_linf"), String::from("stochastic_sinkhorn")])]
        algos: Vec<String>,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// Print the exact OT value of a small problem file.
    Oracle {
        #[arg(long)]
        problem: PathBuf,
    },
}

#[derive(Serialize)]
struct SolveReport<'a> {
    algo: &'a str,
    n: usize,
    eps: f64,
    eta: Option<f64>,
    eps_prime: Option<f64>,
    converged: bool,
    iterations: usize,
    ops: OpCounter,
    ops_total: u64,
    cost: f64,
    residual: f64,
    entropic_residual: f64,
    plan: &'a [f64],
}

enum Outcome {
    Done,
    NotConverged,
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::NotConverged) => {
            eprintln!("eot: solver stopped at its iteration cap before reaching the target accuracy");
            2
        }
        Err(e) => {
            eprintln!("eot: {e:#}");
            1
        }
    }
}

fn read_problem(path: &Path) -> Result<ProblemFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ProblemFile::from_json(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => std::io::stdout().write_all(bytes).context("cannot write to standard output"),
    }
}

fn parse_algos(names: &[String]) -> Result<Vec<Algo>> {
    names.iter().map(|s| s.parse::<Algo>().map_err(Into::into)).collect()
}

fn emit_records(records: &[ExperimentRecord], csv: Option<&Path>) -> Result<Outcome> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    emit(csv, &buf)?;
    Ok(if records.iter().all(|r| r.converged) {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::GenData { side, seed, out } => {
            if side < 2 {
                bail!("--side must be at least 2");
            }
            let (a, b) = image_pair(side, seed);
            let (p, q, cost) = image_pair_to_problem(&a, &b)?;
            emit(Some(&out), ProblemFile::from_parts(&cost, &p, &q).to_json().as_bytes())?;
            Ok(Outcome::Done)
        }
        Command::Solve { algo, norm, eps, batch, seed, problem, max_iters, out } => {
            let (cost, p, q) = read_problem(&problem)?.into_parts()?;
            let eps_abs = eps.accuracy(0.1).resolve(cost.max_abs());
            if matches!(algo, SolveAlgo::Pdasmd) && batch != 1 {
                bail!("--algo pdasmd draws one component per step; use --algo pdasmd-b for --batch {batch}");
            }
            let (name, approx): (&str, Approximation) = match algo {
                SolveAlgo::Pdasmd | SolveAlgo::PdasmdB => {
                    let cfg = SolverConfig {
                        norm_kind: match norm {
                            Norm::L2 => NormKind::L2,
                            Norm::Linf => NormKind::LInf,
                        },
                        batch,
                        seed,
                        max_epochs: max_iters,
                        ..SolverConfig::default()
                    };
                    let name = if matches!(algo, SolveAlgo::Pdasmd) { "pdasmd" } else { "pdasmd-b" };
                    (name, approximate_ot(&cost, &p, &q, eps_abs, &cfg)?)
                }
                SolveAlgo::Sinkhorn => {
                    let cap = max_iters.unwrap_or(CLASSICAL_SINKHORN_CAP);
                    ("sinkhorn", approximate_ot_sinkhorn(&cost, &p, &q, eps_abs, cap)?)
                }
                SolveAlgo::StochSinkhorn => (
                    "stoch-sinkhorn",
                    approximate_ot_stochastic_with(&cost, &p, &q, eps_abs, seed, max_iters)?,
                ),
            };
            let report = SolveReport {
                algo: name,
                n: cost.n(),
                eps: eps_abs,
                eta: approx.params.map(|a| a.eta),
                eps_prime: approx.params.map(|a| a.eps_prime),
                converged: approx.converged,
                iterations: approx.iterations(),
                ops: approx.ops,
                ops_total: approx.ops.total(),
                cost: transport_cost(&cost, &approx.plan)?,
                residual: marginal_residual(&approx.plan, &p, &q)?,
                entropic_residual: approx.entropic_residual(),
                plan: approx.plan.as_slice(),
            };
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(out.as_deref(), text.as_bytes())?;
            Ok(if approx.converged { Outcome::Done } else { Outcome::NotConverged })
        }
        Command::BenchN { sides, eps, algos, common } => {
            let mut records = Vec::new();
            for algo in parse_algos(&algos)? {
                records.extend(run_scaling_experiment(&sides, eps.accuracy(0.5), algo, &common.seeds, common.options())?);
            }
            emit_records(&records, common.csv.as_deref())
        }
        Command::BenchBatch { side, batches, eps, common } => {
            let records = run_batch_experiment(side, &batches, eps.accuracy(0.5), &common.seeds, common.options())?;
            emit_records(&records, common.csv.as_deref())
        }
        Command::BenchEps { side, eps_rel, algos, common } => {
            let list: Vec<Accuracy> = eps_rel.into_iter().map(Accuracy::Relative).collect();
            let records = run_eps_experiment(side, &list, &parse_algos(&algos)?, &common.seeds, common.options())?;
            emit_records(&records, common.csv.as_deref())
        }
        Command::Oracle { problem } => {
            let (cost, p, q) = read_problem(&problem)?.into_parts()?;
            println!("{}", exact_ot_small(&cost, &p, &q)?);
            Ok(Outcome::Done)
        }
    }
}
