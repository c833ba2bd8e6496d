//! Operation-count experiments over problem size, batch size and accuracy.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use eot_core::{
    approximate_ot, approximate_ot_sinkhorn, approximate_ot_stochastic, transport_cost, Approximation, NormKind,
    SolverConfig,
};
use rayon::prelude::*;

use crate::error::{BenchError, Result};
use crate::imagegen::{image_pair, image_pair_to_problem};

/// Sweep cap for classical Sinkhorn inside experiments.
pub const SINKHORN_MAX_SWEEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    PdasmdL2,
    PdasmdLInf,
    Sinkhorn,
    StochasticSinkhorn,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::PdasmdL2, Algo::PdasmdLInf, Algo::Sinkhorn, Algo::StochasticSinkhorn];

    pub fn name(self) -> &'static str {
        match self {
            Algo::PdasmdL2 => "pdasmd_l2",
            Algo::PdasmdLInf => "pdasmd_linf",
            Algo::Sinkhorn => "sinkhorn",
            Algo::StochasticSinkhorn => "stochastic_sinkhorn",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| BenchError::UnknownAlgo(s.to_string()))
    }
}

/// Target accuracy, absolute or as a multiple of `‖C‖∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Accuracy {
    Absolute(f64),
    Relative(f64),
}

impl Accuracy {
    pub fn resolve(self, cost_max: f64) -> f64 {
        match self {
            Accuracy::Absolute(e) => e,
            Accuracy::Relative(r) => r * cost_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `0` lets rayon decide.
    pub jobs: usize,
    /// Fill `wall_ms`. Off by default so output files are reproducible.
    pub wall_clock: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            wall_clock: false,
        }
    }
}

/// One solved cell of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub algo: Algo,
    pub n: usize,
    pub batch: usize,
    /// Absolute accuracy target.
    pub eps: f64,
    pub ops_total: u64,
    pub iterations: usize,
    /// Marginal residual of the entropic solve before rounding.
    pub residual: f64,
    /// `⟨C, X̂⟩` of the rounded plan.
    pub cost: f64,
    pub seed: u64,
    pub wall_ms: f64,
    pub converged: bool,
}

impl ExperimentRecord {
    fn sort_key(&self) -> (Algo, usize, usize, f64, u64) {
        (self.algo, self.n, self.batch, self.eps, self.seed)
    }
}

pub(crate) fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        (ka.0, ka.1, ka.2)
            .cmp(&(kb.0, kb.1, kb.2))
            .then(ka.3.total_cmp(&kb.3))
            .then(ka.4.cmp(&kb.4))
    });
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    algo: Algo,
    side: usize,
    batch: usize,
    eps: Accuracy,
    seed: u64,
}

/// Solves one cell: image pair from `seed`, then the full approximation
/// pipeline of `algo`. PDASMD runs use `ceil(n/B)` inner loops and seed
/// their sampler with `seed`.
pub fn run_cell(
    algo: Algo,
    side: usize,
    batch: usize,
    eps: Accuracy,
    seed: u64,
    wall_clock: bool,
) -> Result<ExperimentRecord> {
    if side < 2 {
        return Err(BenchError::Invalid(format!("image side {side} is below 2")));
    }
    let (a, b) = image_pair(side, seed);
    let (p, q, cost) = image_pair_to_problem(&a, &b)?;
    let eps_abs = eps.resolve(cost.max_abs());
    let start = Instant::now();
    let approx: Approximation = match algo {
        Algo::PdasmdL2 | Algo::PdasmdLInf => {
            let cfg = SolverConfig {
                norm_kind: if algo == Algo::PdasmdL2 { NormKind::L2 } else { NormKind::LInf },
                batch,
                seed,
                ..SolverConfig::default()
            };
            approximate_ot(&cost, &p, &q, eps_abs, &cfg)?
        }
        Algo::Sinkhorn => approximate_ot_sinkhorn(&cost, &p, &q, eps_abs, SINKHORN_MAX_SWEEPS)?,
        Algo::StochasticSinkhorn => approximate_ot_stochastic(&cost, &p, &q, eps_abs, seed)?,
    };
    let wall_ms = if wall_clock {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(ExperimentRecord {
        algo,
        n: side * side,
        batch,
        eps: eps_abs,
        ops_total: approx.ops.total(),
        iterations: approx.iterations(),
        residual: approx.entropic_residual(),
        cost: transport_cost(&cost, &approx.plan)?,
        seed,
        wall_ms,
        converged: approx.converged,
    })
}

fn run_cells(cells: Vec<Cell>, opts: RunOptions) -> Result<Vec<ExperimentRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| BenchError::Invalid(e.to_string()))?;
    let mut records = pool.install(|| {
        cells
            .par_iter()
            .map(|c| run_cell(c.algo, c.side, c.batch, c.eps, c.seed, opts.wall_clock))
            .collect::<Result<Vec<_>>>()
    })?;
    sort_records(&mut records);
    Ok(records)
}

/// Op counts across image sides (`n = side²`) at a fixed accuracy.
pub fn run_scaling_experiment(
    sides: &[usize],
    eps: Accuracy,
    algo: Algo,
    seeds: &[u64],
    opts: RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    let cells = sides
        .iter()
        .flat_map(|&side| seeds.iter().map(move |&seed| Cell { algo, side, batch: 1, eps, seed }))
        .collect();
    run_cells(cells, opts)
}

/// PDASMD-B (ℓ∞ geometry, `l = ceil(n/B)`) across batch sizes.
pub fn run_batch_experiment(
    side: usize,
    batches: &[usize],
    eps: Accuracy,
    seeds: &[u64],
    opts: RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    let n = side * side;
    if let Some(&b) = batches.iter().find(|&&b| b == 0 || b > n) {
        return Err(BenchError::Invalid(format!("batch size {b} outside 1..={n}")));
    }
    let cells = batches
        .iter()
        .flat_map(|&batch| {
            seeds.iter().map(move |&seed| Cell {
                algo: Algo::PdasmdLInf,
                side,
                batch,
                eps,
                seed,
            })
        })
        .collect();
    run_cells(cells, opts)
}

/// Op counts across accuracies for each algorithm.
pub fn run_eps_experiment(
    side: usize,
    eps_list: &[Accuracy],
    algos: &[Algo],
    seeds: &[u64],
    opts: RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    let mut cells = Vec::new();
    for &algo in algos {
        for &eps in eps_list {
            for &seed in seeds {
                cells.push(Cell { algo, side, batch: 1, eps, seed });
            }
        }
    }
    run_cells(cells, opts)
}

/// Mean `ops_total` per distinct `x`, in ascending `x`.
pub fn mean_ops_by<F>(records: &[ExperimentRecord], x: F) -> Vec<(f64, f64)>
where
    F: Fn(&ExperimentRecord) -> f64,
{
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for r in records {
        let key = x(r);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => {
                g.1 += r.ops_total as f64;
                g.2 += 1;
            }
            None => groups.push((key, r.ops_total as f64, 1)),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    groups.into_iter().map(|(k, s, c)| (k, s / c as f64)).collect()
}
