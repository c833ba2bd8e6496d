use crate::error::Result;
use crate::params::{derive_params, smooth_marginals};
use crate::result::Approximation;
use crate::rounding::round_counted;
use crate::types::{CostMatrix, EntropicProblem, SimplexVector, TransportPlan};

use super::solver::{pdasmd_batch_solve, SolverConfig};

/// Feasible `ε`-approximate OT plan via PDASMD on the entropic problem.
///
/// Derives `(η, ε′)`, smooths the marginals, solves until the averaged
/// primal has residual `≤ ε′/2` and gap surrogate `≤ ε/4`, then rounds onto
/// `U(p, q)`. `cfg.stop_residual` and `cfg.stop_gap` are overwritten.
pub fn approximate_ot(
    cost: &CostMatrix,
    p: &SimplexVector,
    q: &SimplexVector,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<Approximation> {
    if let Some(trivial) = zero_cost_shortcut(cost, p, q, eps)? {
        return Ok(trivial);
    }
    let params = derive_params(eps, cost, p.len())?;
    let (ps, qs) = smooth_marginals(p, q, params.eps_prime)?;
    let prob = EntropicProblem::new(cost.clone(), ps, qs, params.eta)?;
    let cfg = SolverConfig {
        stop_residual: params.eps_prime / 2.0,
        stop_gap: eps / 4.0,
        ..cfg.clone()
    };
    let solve = pdasmd_batch_solve(&prob, &cfg)?;
    let mut ops = solve.ops;
    let plan = round_counted(&solve.plan, p, q, &mut ops)?;
    Ok(Approximation {
        plan,
        params: Some(params),
        converged: solve.converged,
        solve: Some(solve),
        ops,
    })
}

/// `‖C‖∞ = 0`: every coupling is optimal, return `p qᵀ`.
pub(crate) fn zero_cost_shortcut(
    cost: &CostMatrix,
    p: &SimplexVector,
    q: &SimplexVector,
    eps: f64,
) -> Result<Option<Approximation>> {
    use crate::error::OtError;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(OtError::BadEps(eps));
    }
    for len in [p.len(), q.len()] {
        if len != cost.n() {
            return Err(OtError::ShapeMismatch { expected: cost.n(), got: len });
        }
    }
    if cost.max_abs() > 0.0 {
        return Ok(None);
    }
    Ok(Some(Approximation {
        plan: TransportPlan::outer(p, q),
        params: None,
        solve: None,
        ops: Default::default(),
        converged: true,
    }))
}
