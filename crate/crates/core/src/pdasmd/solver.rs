use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{OtError, Result};
use crate::objective::{entropic_objective_counted, residual_from_sums_counted};
use crate::ops::OpCounter;
use crate::result::{DualState, SolveResult};
use crate::semidual::{
    primal_from_dual_counted, smoothness_constants, value_and_grad_counted, DualPoint, NormKind,
};
use crate::types::{EntropicProblem, TransportPlan};

use super::sampler::ComponentSampler;
use super::steps::{
    charge_prox, couple, mirror_step_in_place, prox_step_into, reduced_gradient_into, schedule,
    GradScratch,
};

/// Settings for one PDASMD / PDASMD-B run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub norm_kind: NormKind,
    /// Inner iterations per epoch; defaults to `ceil(n / batch)`.
    pub inner_loops: Option<usize>,
    /// Epoch cap; defaults to ten times the theoretical epoch count implied
    /// by the stopping targets (log factors dropped).
    pub max_epochs: Option<usize>,
    pub batch: usize,
    pub seed: u64,
    /// Target on `‖A x − b‖₁` of the averaged primal. Zero disables early stopping.
    pub stop_residual: f64,
    /// Target on the gap surrogate `f(x) + min φ(ṽ)`.
    pub stop_gap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            norm_kind: NormKind::LInf,
            inner_loops: None,
            max_epochs: None,
            batch: 1,
            seed: 0,
            stop_residual: 0.0,
            stop_gap: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn inner_loops_for(&self, n: usize) -> usize {
        self.inner_loops.unwrap_or_else(|| n.div_ceil(self.batch.max(1)))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.batch == 0 || self.batch > n {
            return Err(OtError::InvalidConfig(format!(
                "batch size {} must lie in 1..={n}",
                self.batch
            )));
        }
        if self.inner_loops == Some(0) {
            return Err(OtError::InvalidConfig("inner loop count must be >= 1".into()));
        }
        if self.max_epochs == Some(0) {
            return Err(OtError::InvalidConfig("epoch cap must be >= 1".into()));
        }
        if !(self.stop_residual >= 0.0) || !(self.stop_gap >= 0.0) {
            return Err(OtError::InvalidConfig("stopping targets must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Epoch cap from the convergence bound, with `R = ‖C‖∞` (scaled by `√n`
/// in the ℓ₂ geometry) and log factors dropped, times ten.
pub fn default_epoch_cap(prob: &EntropicProblem, cfg: &SolverConfig) -> Result<usize> {
    if cfg.stop_residual <= 0.0 || cfg.stop_gap <= 0.0 {
        return Err(OtError::InvalidConfig(
            "max_epochs is required when early stopping is disabled".into(),
        ));
    }
    let n = prob.n() as f64;
    let l = cfg.inner_loops_for(prob.n()) as f64;
    let b = cfg.batch as f64;
    let eps = 4.0 * cfg.stop_gap;
    let eps_prime = 2.0 * cfg.stop_residual;
    let (l_bar, gamma, radius, to_l1) = match cfg.norm_kind {
        NormKind::L2 => (1.0 / prob.eta(), 1.0, n.sqrt() * prob.cost().max_abs(), (2.0 * n).sqrt()),
        NormKind::LInf => (5.0 / prob.eta(), n, prob.cost().max_abs(), 1.0),
    };
    let lead = 1.0 + (l - 1.0) / b + 18.0 * gamma;
    let residual_term = 2.0 * lead * l_bar * radius * to_l1 / (l * eps_prime / 2.0);
    let gap_term = 2.0 * lead * l_bar * radius * radius / (l * eps / 4.0);
    let theory = residual_term.max(gap_term).sqrt().ceil();
    Ok((10.0 * theory).min(1e7) as usize)
}

/// Snapshot handed to observers at the end of every epoch.
#[derive(Debug, Clone)]
pub struct IterateState<'a> {
    pub epoch: usize,
    pub y: &'a [f64],
    pub z: &'a [f64],
    pub v: &'a [f64],
    pub v_tilde: &'a [f64],
    /// Full gradient `μˢ` used during this epoch.
    pub mu: &'a [f64],
    /// `∑_{s′≤s} 1/τ_{1,s′}`.
    pub c_acc: f64,
    pub averaged_plan: &'a TransportPlan,
    pub residual: f64,
    pub gap: f64,
}

/// Plain PDASMD (single-sample inner iterations).
pub fn pdasmd_solve(prob: &EntropicProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    if cfg.batch != 1 {
        return Err(OtError::InvalidConfig(
            "plain PDASMD draws one component per step; use the batch solver".into(),
        ));
    }
    run(prob, cfg, &mut |_| {})
}

/// PDASMD-B: `batch` i.i.d. components per inner iteration and `τ₂ = 1/(2B)`.
pub fn pdasmd_batch_solve(prob: &EntropicProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    run(prob, cfg, &mut |_| {})
}

/// Batch solver with an end-of-epoch observer.
pub fn pdasmd_solve_observed(
    prob: &EntropicProblem,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&IterateState<'_>),
) -> Result<SolveResult> {
    run(prob, cfg, observer)
}

/// Random stream order per epoch: one uniform draw selecting which inner
/// iterate feeds the primal average, then `batch` component draws per inner
/// iteration in order.
fn run(
    prob: &EntropicProblem,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&IterateState<'_>),
) -> Result<SolveResult> {
    let n = prob.n();
    cfg.validate(n)?;
    let max_epochs = match cfg.max_epochs {
        Some(s) => s,
        None => default_epoch_cap(prob, cfg)?,
    };
    let inner = cfg.inner_loops_for(n);
    let profile = smoothness_constants(prob, cfg.norm_kind);
    let l_bar = profile.mean;
    let sampler = ComponentSampler::new(&profile);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ops = OpCounter::new();

    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut v_tilde = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut y_sum = vec![0.0; n];
    let mut y_pick = vec![0.0; n];
    let mut indices = vec![0usize; cfg.batch];
    let mut scratch = GradScratch::new(n);
    let mut plan_acc = vec![0.0; n * n];
    let mut averaged = TransportPlan::zeros(n);
    let mut c_acc = 0.0;
    let mut best_phi = f64::INFINITY;
    let mut residual_history = Vec::new();
    let mut converged = false;
    let mut epochs_run = 0;

    let (_, mut mu) = value_and_grad_counted(&v_tilde, prob, &mut ops);

    for s in 0..max_epochs {
        let sched = schedule(s, l_bar, cfg.batch);
        let pick = rng.gen_range(0..inner);
        y_sum.iter_mut().for_each(|x| *x = 0.0);

        for j in 0..inner {
            couple(&z, &v_tilde, &y, &sched, &mut v);
            ops.mul(3 * n);
            ops.add(2 * n + 2);
            for slot in indices.iter_mut() {
                *slot = sampler.draw_counted(&mut rng, &mut ops);
            }
            reduced_gradient_into(
                &v,
                &v_tilde,
                &mu,
                &indices,
                sampler.probs(),
                prob,
                &mut scratch,
                &mut grad,
                &mut ops,
            );
            mirror_step_in_place(&mut z, &grad, sched.alpha);
            ops.mul(n);
            ops.add(n);
            prox_step_into(&v, &grad, l_bar, cfg.norm_kind, &mut y);
            charge_prox(&mut ops, n, cfg.norm_kind);
            for (acc, &yk) in y_sum.iter_mut().zip(&y) {
                *acc += yk;
            }
            ops.add(n);
            if j == pick {
                y_pick.copy_from_slice(&y);
            }
        }

        let inv_l = 1.0 / inner as f64;
        for (vt, &acc) in v_tilde.iter_mut().zip(&y_sum) {
            *vt = acc * inv_l;
        }
        ops.div(1);
        ops.mul(n);
        if !v_tilde.iter().chain(&z).chain(&y).all(|x| x.is_finite()) {
            return Err(OtError::NonFinite { epoch: s });
        }

        // primal averaging with weights 1/τ₁
        c_acc += sched.inv_tau1;
        let sampled = primal_from_dual_counted(&y_pick, prob, &mut ops);
        let inv_c = 1.0 / c_acc;
        {
            let avg = averaged.as_mut_slice();
            for ((acc, &x), a) in plan_acc.iter_mut().zip(sampled.as_slice()).zip(avg.iter_mut()) {
                *acc += sched.inv_tau1 * x;
                *a = *acc * inv_c;
            }
        }
        ops.add(n * n + 1);
        ops.mul(2 * n * n);
        ops.div(1);

        // monitoring; the gradient at the new anchor is next epoch's μ
        let (phi, next_mu) = value_and_grad_counted(&v_tilde, prob, &mut ops);
        best_phi = best_phi.min(phi);
        ops.cmp(1);
        let rows = averaged.row_sums();
        let cols = averaged.col_sums();
        ops.add(2 * n * n);
        let residual = residual_from_sums_counted(
            &rows,
            &cols,
            prob.p().as_slice(),
            prob.q().as_slice(),
            &mut ops,
        );
        let gap = entropic_objective_counted(prob.cost(), &averaged, prob.eta(), &mut ops) + best_phi;
        ops.add(1);
        residual_history.push(residual);
        epochs_run = s + 1;

        observer(&IterateState {
            epoch: s,
            y: &y,
            z: &z,
            v: &v,
            v_tilde: &v_tilde,
            mu: &mu,
            c_acc,
            averaged_plan: &averaged,
            residual,
            gap,
        });
        mu = next_mu;

        ops.cmp(2);
        if cfg.stop_residual > 0.0 && residual <= cfg.stop_residual && gap <= cfg.stop_gap {
            converged = true;
            break;
        }
    }

    Ok(SolveResult {
        plan: averaged,
        dual: DualState::Semidual(DualPoint(v_tilde)),
        iterations: epochs_run,
        residual_history,
        ops,
        converged,
    })
}
