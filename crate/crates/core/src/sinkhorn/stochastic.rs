//! Greedy-randomized Sinkhorn: each iteration rescales a single row or
//! column, chosen with probability increasing in its KL marginal violation.
//!
//! Row and column sums of the current plan are maintained incrementally, so
//! an iteration touches `O(n)` numbers. Scalings live in the multiplicative
//! domain with the kernel `exp(−C/η)` cached; the state moves to the log
//! domain once the kernel underflows or a scaling leaves `[e⁻³⁰⁰, e³⁰⁰]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{OtError, Result};
use crate::ops::OpCounter;
use crate::params::{derive_params, smooth_marginals};
use crate::pdasmd::zero_cost_shortcut;
use crate::result::{Approximation, DualState, SolveResult};
use crate::rounding::round_counted;
use crate::types::{CostMatrix, EntropicProblem, SimplexVector, TransportPlan};

use super::{plan_from_scalings, ScalingPair};

const LOG_LIMIT: f64 = 300.0;
const MAX_VIOLATION: f64 = 1e300;
/// Kernel products below this move the state to the log domain.
const TINY: f64 = 1e-280;

/// `[KL(p′ᵢ ‖ (X1)ᵢ)]ᵢ` stacked over `[KL(q′ⱼ ‖ (Xᵀ1)ⱼ)]ⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationVector(pub Vec<f64>);

/// Scalar KL `a log(a/b) − a + b`, with `0 log 0 = 0`.
///
/// Near `b = a` this is evaluated as `a·(t − log(1 + t))` with
/// `t = (b − a)/a` (a short series for tiny `t`), so that nearly matched
/// marginals keep a positive violation instead of cancelling to zero.
#[inline]
pub fn scalar_kl(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        return b;
    }
    let t = (b - a) / a;
    if t.abs() >= 0.5 {
        return a * (a / b).ln() - a + b;
    }
    let excess = if t.abs() < 1e-3 {
        // t²/2 − t³/3 + t⁴/4 − t⁵/5
        t * t * (0.5 - t * (1.0 / 3.0 - t * (0.25 - t * 0.2)))
    } else {
        t - t.ln_1p()
    };
    a * excess
}

pub fn kl_violation(x: &TransportPlan, p: &SimplexVector, q: &SimplexVector) -> Result<ViolationVector> {
    if x.rows() != p.len() || x.cols() != q.len() {
        return Err(OtError::ShapeMismatch {
            expected: p.len() * q.len(),
            got: x.rows() * x.cols(),
        });
    }
    let rows = x.row_sums();
    let cols = x.col_sums();
    let mut out = Vec::with_capacity(rows.len() + cols.len());
    for (k, (&target, &sum)) in p.as_slice().iter().zip(&rows).enumerate() {
        if sum <= 0.0 {
            return Err(OtError::DegenerateRow(k));
        }
        out.push(scalar_kl(target, sum).max(0.0));
    }
    for (k, (&target, &sum)) in q.as_slice().iter().zip(&cols).enumerate() {
        if sum <= 0.0 {
            return Err(OtError::DegenerateRow(rows.len() + k));
        }
        out.push(scalar_kl(target, sum).max(0.0));
    }
    Ok(ViolationVector(out))
}

/// `Ψ(h)ᵢ = g(hᵢ) / ∑ⱼ g(hⱼ)`.
pub fn increasing_probability(h: &[f64], g: impl Fn(f64) -> f64) -> Result<SimplexVector> {
    let weights: Vec<f64> = h.iter().map(|&x| g(x)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(OtError::AllZero);
    }
    Ok(SimplexVector::from_raw(weights.into_iter().map(|w| w / total).collect()))
}

/// Options for [`stochastic_sinkhorn_solve_with`].
#[derive(Debug, Clone, Copy)]
pub struct StochasticConfig {
    pub tol: f64,
    pub seed: u64,
    pub max_iters: usize,
    /// Increasing map applied to the KL violations before normalizing.
    pub g: fn(f64) -> f64,
}

impl StochasticConfig {
    pub fn new(tol: f64, seed: u64, max_iters: usize) -> Self {
        Self {
            tol,
            seed,
            max_iters,
            g: |x| x,
        }
    }
}

pub fn stochastic_sinkhorn_solve(
    prob: &EntropicProblem,
    tol: f64,
    seed: u64,
    max_iters: usize,
) -> Result<SolveResult> {
    stochastic_sinkhorn_solve_with(prob, &StochasticConfig::new(tol, seed, max_iters))
}

enum Scalings {
    Linear { kernel: Vec<f64>, u: Vec<f64>, v: Vec<f64> },
    Log(ScalingPair),
}

struct State<'a> {
    prob: &'a EntropicProblem,
    n: usize,
    inv_eta: f64,
    scalings: Scalings,
    rows: Vec<f64>,
    cols: Vec<f64>,
}

impl<'a> State<'a> {
    fn new(prob: &'a EntropicProblem, ops: &mut OpCounter) -> Self {
        let n = prob.n();
        let inv_eta = 1.0 / prob.eta();
        let max_exponent = prob.cost().max_abs() * inv_eta;
        let scalings = if max_exponent < 2.0 * LOG_LIMIT {
            let kernel: Vec<f64> = prob.cost().as_slice().iter().map(|&c| (-c * inv_eta).exp()).collect();
            ops.mul(n * n);
            ops.exp(n * n);
            Scalings::Linear {
                kernel,
                u: vec![1.0; n],
                v: vec![1.0; n],
            }
        } else {
            Scalings::Log(ScalingPair::ones(n))
        };
        let mut state = Self {
            prob,
            n,
            inv_eta,
            scalings,
            rows: vec![0.0; n],
            cols: vec![0.0; n],
        };
        state.refresh_sums(ops);
        state
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.scalings {
            Scalings::Linear { kernel, u, v } => u[i] * kernel[i * self.n + j] * v[j],
            Scalings::Log(s) => (s.log_u[i] - self.prob.cost().get(i, j) * self.inv_eta + s.log_v[j]).exp(),
        }
    }

    /// Recomputes both marginals from scratch, `O(n²)`.
    fn refresh_sums(&mut self, ops: &mut OpCounter) {
        let n = self.n;
        let mut rows = vec![0.0; n];
        let mut cols = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let x = self.entry(i, j);
                rows[i] += x;
                cols[j] += x;
            }
        }
        match self.scalings {
            Scalings::Linear { .. } => ops.mul(2 * n * n),
            Scalings::Log(_) => {
                ops.exp(n * n);
                ops.mul(n * n);
                ops.add(2 * n * n);
            }
        }
        ops.add(2 * n * n);
        self.rows = rows;
        self.cols = cols;
    }

    fn residual(&self, ops: &mut OpCounter) -> f64 {
        ops.add(4 * self.n);
        let p = self.prob.p().as_slice();
        let q = self.prob.q().as_slice();
        self.rows.iter().zip(p).map(|(a, b)| (a - b).abs()).sum::<f64>()
            + self.cols.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    fn switch_to_log(&mut self) {
        if let Scalings::Linear { u, v, .. } = &self.scalings {
            let pair = ScalingPair {
                log_u: u.iter().map(|x| x.ln()).collect(),
                log_v: v.iter().map(|x| x.ln()).collect(),
            };
            self.scalings = Scalings::Log(pair);
        }
    }

    /// Rescales row `i` so that its sum equals `p′ᵢ`.
    fn update_row(&mut self, i: usize, ops: &mut OpCounter) {
        let n = self.n;
        let target = self.prob.p()[i];
        match &mut self.scalings {
            Scalings::Linear { kernel, u, v } => {
                let krow = &kernel[i * n..(i + 1) * n];
                let kv: f64 = krow.iter().zip(v.iter()).map(|(k, vj)| k * vj).sum();
                if kv < TINY {
                    ops.mul(n);
                    ops.add(n);
                    self.switch_to_log();
                    return self.update_row(i, ops);
                }
                let u_new = target / kv;
                let delta = u_new - u[i];
                for ((c, &k), &vj) in self.cols.iter_mut().zip(krow).zip(v.iter()) {
                    *c += delta * k * vj;
                }
                u[i] = u_new;
                ops.mul(3 * n);
                ops.add(2 * n + 1);
                ops.div(1);
                ops.cmp(2);
                if !(u_new.ln().abs() < LOG_LIMIT) {
                    self.switch_to_log();
                }
            }
            Scalings::Log(s) => {
                let crow = self.prob.cost().row(i);
                let (lse, max) = log_update(crow, &s.log_v, self.inv_eta);
                let old_scale = (s.log_u[i] + max).exp();
                let new_scale = (target.ln() - lse + max).exp();
                for ((c, &cij), &lv) in self.cols.iter_mut().zip(crow).zip(&s.log_v) {
                    let e = (lv - cij * self.inv_eta - max).exp();
                    *c += (new_scale - old_scale) * e;
                }
                s.log_u[i] = target.ln() - lse;
                charge_log_update(ops, n);
            }
        }
        self.rows[i] = target;
    }

    fn update_col(&mut self, j: usize, ops: &mut OpCounter) {
        let n = self.n;
        let target = self.prob.q()[j];
        match &mut self.scalings {
            Scalings::Linear { kernel, u, v } => {
                let ku: f64 = (0..n).map(|i| kernel[i * n + j] * u[i]).sum();
                if ku < TINY {
                    ops.mul(n);
                    ops.add(n);
                    self.switch_to_log();
                    return self.update_col(j, ops);
                }
                let v_new = target / ku;
                let delta = v_new - v[j];
                for (i, r) in self.rows.iter_mut().enumerate() {
                    *r += delta * kernel[i * n + j] * u[i];
                }
                v[j] = v_new;
                ops.mul(3 * n);
                ops.add(2 * n + 1);
                ops.div(1);
                ops.cmp(2);
                if !(v_new.ln().abs() < LOG_LIMIT) {
                    self.switch_to_log();
                }
            }
            Scalings::Log(s) => {
                let ccol: Vec<f64> = (0..n).map(|i| self.prob.cost().get(i, j)).collect();
                let (lse, max) = log_update(&ccol, &s.log_u, self.inv_eta);
                let old_scale = (s.log_v[j] + max).exp();
                let new_scale = (target.ln() - lse + max).exp();
                for ((r, &cij), &lu) in self.rows.iter_mut().zip(&ccol).zip(&s.log_u) {
                    let e = (lu - cij * self.inv_eta - max).exp();
                    *r += (new_scale - old_scale) * e;
                }
                s.log_v[j] = target.ln() - lse;
                charge_log_update(ops, n);
            }
        }
        self.cols[j] = target;
    }

    fn into_pair(self) -> ScalingPair {
        match self.scalings {
            Scalings::Linear { u, v, .. } => ScalingPair {
                log_u: u.iter().map(|x| x.ln()).collect(),
                log_v: v.iter().map(|x| x.ln()).collect(),
            },
            Scalings::Log(s) => s,
        }
    }
}

/// Returns `(LSEₖ(otherₖ − cₖ/η), max)`.
fn log_update(costs: &[f64], other: &[f64], inv_eta: f64) -> (f64, f64) {
    let max = costs
        .iter()
        .zip(other)
        .map(|(&c, &o)| o - c * inv_eta)
        .fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = costs
        .iter()
        .zip(other)
        .map(|(&c, &o)| (o - c * inv_eta - max).exp())
        .sum();
    (max + total.ln(), max)
}

fn charge_log_update(ops: &mut OpCounter, n: usize) {
    ops.mul(3 * n + 1);
    ops.add(7 * n + 4);
    ops.cmp(n);
    ops.exp(2 * n + 2);
    ops.log(2);
}

pub fn stochastic_sinkhorn_solve_with(prob: &EntropicProblem, cfg: &StochasticConfig) -> Result<SolveResult> {
    let n = prob.n();
    let mut ops = OpCounter::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = State::new(prob, &mut ops);
    let mut weights = vec![0.0; 2 * n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let depth = (usize::BITS - (2 * n).leading_zeros()) as usize;

    let mut residual = state.residual(&mut ops);
    history.push(residual);
    loop {
        ops.cmp(1);
        if residual <= cfg.tol {
            // incremental sums can drift; confirm on exact ones
            state.refresh_sums(&mut ops);
            residual = state.residual(&mut ops);
            if residual <= cfg.tol {
                converged = true;
                break;
            }
        }
        if iterations >= cfg.max_iters {
            break;
        }

        // h = Ψ(ρ) as cumulative weights
        let p = prob.p().as_slice();
        let q = prob.q().as_slice();
        let mut total = 0.0;
        for (k, w) in weights.iter_mut().enumerate() {
            let rho = if k < n {
                scalar_kl(p[k], state.rows[k])
            } else {
                scalar_kl(q[k - n], state.cols[k - n])
            };
            // an underflowed marginal has infinite violation; keep the sum finite
            total += (cfg.g)(rho.clamp(0.0, MAX_VIOLATION)).min(MAX_VIOLATION);
            *w = total;
        }
        // KL: sub, div, log1p or short series, mul, clamp; g; running sum
        ops.div(2 * n);
        ops.log(2 * n);
        ops.mul(2 * 2 * n);
        ops.add(2 * 2 * n + 2 * n);
        ops.cmp(2 * n);
        ops.mul(2 * n);
        if !(total > 0.0) {
            return Err(OtError::AllZero);
        }
        let u = rng.gen::<f64>() * total;
        let pick = weights.partition_point(|&c| c <= u).min(2 * n - 1);
        ops.mul(1);
        ops.cmp(depth);

        if pick < n {
            state.update_row(pick, &mut ops);
        } else {
            state.update_col(pick - n, &mut ops);
        }
        iterations += 1;
        residual = state.residual(&mut ops);
        history.push(residual);
    }

    let pair = state.into_pair();
    Ok(SolveResult {
        plan: plan_from_scalings(&pair, prob),
        dual: DualState::Scalings(pair),
        iterations,
        residual_history: history,
        ops,
        converged,
    })
}

/// Iteration cap from the coordinate-update bound `2 + 224 n R/ε′`, with
/// `R = ‖C‖∞/η + log n − 2 log min(p′, q′)`, clamped to `5·10⁷`.
fn default_iteration_cap(prob: &EntropicProblem, eps_prime: f64) -> usize {
    let n = prob.n() as f64;
    let floor = prob.p().min().min(prob.q().min());
    let radius = prob.cost().max_abs() / prob.eta() + n.ln() - 2.0 * floor.ln();
    (2.0 + 224.0 * n * radius / eps_prime).min(5e7) as usize
}

/// Smoothing, stochastic Sinkhorn to residual `ε′/2`, rounding.
pub fn approximate_ot_stochastic(
    cost: &CostMatrix,
    p: &SimplexVector,
    q: &SimplexVector,
    eps: f64,
    seed: u64,
) -> Result<Approximation> {
    approximate_ot_stochastic_with(cost, p, q, eps, seed, None)
}

pub fn approximate_ot_stochastic_with(
    cost: &CostMatrix,
    p: &SimplexVector,
    q: &SimplexVector,
    eps: f64,
    seed: u64,
    max_iters: Option<usize>,
) -> Result<Approximation> {
    if let Some(trivial) = zero_cost_shortcut(cost, p, q, eps)? {
        return Ok(trivial);
    }
    let params = derive_params(eps, cost, p.len())?;
    let (ps, qs) = smooth_marginals(p, q, params.eps_prime)?;
    let prob = EntropicProblem::new(cost.clone(), ps, qs, params.eta)?;
    let cap = max_iters.unwrap_or_else(|| default_iteration_cap(&prob, params.eps_prime));
    let solve = stochastic_sinkhorn_solve(&prob, params.eps_prime / 2.0, seed, cap)?;
    let mut ops = solve.ops;
    let n = prob.n();
    ops.exp(n * n);
    ops.add(2 * n * n);
    ops.mul(n * n);
    let plan = round_counted(&solve.plan, p, q, &mut ops)?;
    Ok(Approximation {
        plan,
        params: Some(params),
        converged: solve.converged,
        solve: Some(solve),
        ops,
    })
}
