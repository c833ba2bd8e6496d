//! Sinkhorn baselines: classical alternating scaling (log domain) and the
//! greedy-randomized single-coordinate variant, plus their approximation
//! pipelines.

mod classical;
mod stochastic;

pub use classical::{approximate_ot_sinkhorn, sinkhorn_solve, sinkhorn_step, Side};
pub use stochastic::{
    approximate_ot_stochastic, approximate_ot_stochastic_with, increasing_probability,
    kl_violation, scalar_kl, stochastic_sinkhorn_solve, stochastic_sinkhorn_solve_with,
    StochasticConfig, ViolationVector,
};

use crate::types::{EntropicProblem, TransportPlan};

/// Log-domain scalings: `X = diag(e^{log_u}) exp(−C/η) diag(e^{log_v})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPair {
    pub log_u: Vec<f64>,
    pub log_v: Vec<f64>,
}

impl ScalingPair {
    /// `u = v = 1`.
    pub fn ones(n: usize) -> Self {
        Self {
            log_u: vec![0.0; n],
            log_v: vec![0.0; n],
        }
    }
}

/// `Xᵢⱼ = exp(log_uᵢ − Cᵢⱼ/η + log_vⱼ)`.
pub fn plan_from_scalings(s: &ScalingPair, prob: &EntropicProblem) -> TransportPlan {
    let n = prob.n();
    let inv_eta = 1.0 / prob.eta();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = prob.cost().row(i);
        entries.extend(
            row.iter()
                .zip(&s.log_v)
                .map(|(&c, &lv)| (s.log_u[i] - c * inv_eta + lv).exp()),
        );
    }
    TransportPlan::from_raw(n, n, entries)
}
