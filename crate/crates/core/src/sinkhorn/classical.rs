use crate::error::Result;
use crate::ops::OpCounter;
use crate::params::{derive_params, smooth_marginals};
use crate::pdasmd::zero_cost_shortcut;
use crate::result::{Approximation, DualState, SolveResult};
use crate::rounding::round_counted;
use crate::types::{CostMatrix, EntropicProblem, SimplexVector};

use super::{plan_from_scalings, ScalingPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Row,
    Col,
}

/// One half-step: rescale rows (or columns) so the new plan's row (column)
/// sums equal `p′` (`q′`).
pub fn sinkhorn_step(s: &ScalingPair, prob: &EntropicProblem, side: Side) -> ScalingPair {
    let mut out = s.clone();
    let mut scratch = vec![0.0; prob.n()];
    match side {
        Side::Row => {
            let lse = row_lse(&out, prob, &mut scratch, &mut OpCounter::new());
            update_row_scalings(&mut out, prob, &lse, &mut OpCounter::new());
        }
        Side::Col => col_step(&mut out, prob, &mut scratch, &mut OpCounter::new()),
    }
    out
}

/// `LSEⱼ(log_vⱼ − Cᵢⱼ/η)` for every row; the plan's log row sums are
/// `log_uᵢ` plus these.
fn row_lse(s: &ScalingPair, prob: &EntropicProblem, scratch: &mut [f64], ops: &mut OpCounter) -> Vec<f64> {
    let n = prob.n();
    let inv_eta = 1.0 / prob.eta();
    let out = (0..n)
        .map(|i| {
            let mut max = f64::NEG_INFINITY;
            for ((t, &c), &lv) in scratch.iter_mut().zip(prob.cost().row(i)).zip(&s.log_v) {
                *t = lv - c * inv_eta;
                max = max.max(*t);
            }
            max + scratch.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
        })
        .collect();
    charge_lse_block(ops, n);
    out
}

fn update_row_scalings(s: &mut ScalingPair, prob: &EntropicProblem, lse: &[f64], ops: &mut OpCounter) {
    for ((lu, &p), &l) in s.log_u.iter_mut().zip(prob.p().as_slice()).zip(lse) {
        *lu = p.ln() - l;
    }
    ops.log(lse.len());
    ops.add(lse.len());
}

fn col_step(s: &mut ScalingPair, prob: &EntropicProblem, scratch: &mut [f64], ops: &mut OpCounter) {
    let n = prob.n();
    let inv_eta = 1.0 / prob.eta();
    for j in 0..n {
        let mut max = f64::NEG_INFINITY;
        for (i, t) in scratch.iter_mut().enumerate() {
            *t = s.log_u[i] - prob.cost().get(i, j) * inv_eta;
            max = max.max(*t);
        }
        let lse = max + scratch.iter().map(|&t| (t - max).exp()).sum::<f64>().ln();
        s.log_v[j] = prob.q()[j].ln() - lse;
    }
    charge_lse_block(ops, n);
    ops.log(n);
    ops.add(n);
}

fn charge_lse_block(ops: &mut OpCounter, n: usize) {
    ops.div(1);
    ops.mul(n * n);
    ops.add(3 * n * n + n);
    ops.cmp(n * n);
    ops.exp(n * n);
    ops.log(n);
}

/// Alternating row/column scaling until `‖X1 − p′‖₁ + ‖Xᵀ1 − q′‖₁ ≤ tol`.
/// `max_iters` counts full (row + column) sweeps.
pub fn sinkhorn_solve(prob: &EntropicProblem, tol: f64, max_iters: usize) -> Result<SolveResult> {
    let n = prob.n();
    let mut ops = OpCounter::new();
    let mut s = ScalingPair::ones(n);
    let mut scratch = vec![0.0; n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    // Row LSEs are needed both for the row update and for the residual
    // after a column update, so each sweep computes them once.
    let mut lse = row_lse(&s, prob, &mut scratch, &mut ops);
    for it in 0..max_iters {
        update_row_scalings(&mut s, prob, &lse, &mut ops);
        col_step(&mut s, prob, &mut scratch, &mut ops);
        iterations = it + 1;
        // columns are exact now; the residual lives in the rows
        lse = row_lse(&s, prob, &mut scratch, &mut ops);
        let residual: f64 = s
            .log_u
            .iter()
            .zip(&lse)
            .zip(prob.p().as_slice())
            .map(|((lu, l), p)| ((lu + l).exp() - p).abs())
            .sum();
        ops.add(3 * n);
        ops.exp(n);
        history.push(residual);
        ops.cmp(1);
        if residual <= tol {
            converged = true;
            break;
        }
    }
    Ok(SolveResult {
        plan: plan_from_scalings(&s, prob),
        dual: DualState::Scalings(s),
        iterations,
        residual_history: history,
        ops,
        converged,
    })
}

/// Smoothing, classical Sinkhorn to residual `ε′/2`, rounding.
pub fn approximate_ot_sinkhorn(
    cost: &CostMatrix,
    p: &SimplexVector,
    q: &SimplexVector,
    eps: f64,
    max_iters: usize,
) -> Result<Approximation> {
    if let Some(trivial) = zero_cost_shortcut(cost, p, q, eps)? {
        return Ok(trivial);
    }
    let params = derive_params(eps, cost, p.len())?;
    let (ps, qs) = smooth_marginals(p, q, params.eps_prime)?;
    let prob = EntropicProblem::new(cost.clone(), ps, qs, params.eta)?;
    let solve = sinkhorn_solve(&prob, params.eps_prime / 2.0, max_iters)?;
    let mut ops = solve.ops;
    let n = prob.n();
    // plan materialization
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
