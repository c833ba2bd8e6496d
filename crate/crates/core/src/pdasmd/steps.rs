//! Closed-form pieces of one accelerated inner iteration with the
//! half-squared-Euclidean mirror map.

use crate::ops::OpCounter;
use crate::semidual::{component_grad_into, NormKind, SmoothnessProfile};
use crate::types::EntropicProblem;

/// Per-epoch step parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    /// Negative-momentum weight on `z`: `2/(s+4)`.
    pub tau1: f64,
    /// Katyusha weight on the epoch anchor: `1/(2B)`.
    pub tau2: f64,
    /// Mirror step size `1/(9 τ₁ L̄)`.
    pub alpha: f64,
    /// `1/τ₁ = (s+4)/2`, kept exact for the primal averaging weights.
    pub inv_tau1: f64,
}

pub fn schedule(epoch: usize, l_bar: f64, batch: usize) -> Schedule {
    let tau1 = 2.0 / (epoch as f64 + 4.0);
    Schedule {
        tau1,
        tau2: 1.0 / (2.0 * batch as f64),
        alpha: 1.0 / (9.0 * tau1 * l_bar),
        inv_tau1: (epoch as f64 + 4.0) / 2.0,
    }
}

/// `v = τ₁ z + τ₂ ṽ + (1 − τ₁ − τ₂) y`.
pub fn couple(z: &[f64], v_tilde: &[f64], y: &[f64], sched: &Schedule, out: &mut [f64]) {
    let w = 1.0 - sched.tau1 - sched.tau2;
    for (((o, &zk), &vk), &yk) in out.iter_mut().zip(z).zip(v_tilde).zip(y) {
        *o = sched.tau1 * zk + sched.tau2 * vk + w * yk;
    }
}

/// Mirror step `z − α ∇̃`.
pub fn mirror_step_z(z: &[f64], grad: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = z.to_vec();
    mirror_step_in_place(&mut out, grad, alpha);
    out
}

pub(crate) fn mirror_step_in_place(z: &mut [f64], grad: &[f64], alpha: f64) {
    for (zk, &g) in z.iter_mut().zip(grad) {
        *zk -= alpha * g;
    }
}

/// Proximal step `argmin_y (9L̄/2)‖y − v‖² + ⟨∇̃, y⟩` in the chosen norm.
///
/// ℓ₂: `v − ∇̃/(9L̄)`. ℓ∞: `v − (‖∇̃‖₁/(9L̄)) sign(∇̃)` with `sign(0) = −1`.
pub fn prox_step_y(v: &[f64], grad: &[f64], l_bar: f64, norm: NormKind) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    prox_step_into(v, grad, l_bar, norm, &mut out);
    out
}

pub(crate) fn prox_step_into(v: &[f64], grad: &[f64], l_bar: f64, norm: NormKind, out: &mut [f64]) {
    match norm {
        NormKind::L2 => {
            let step = 1.0 / (9.0 * l_bar);
            for ((o, &vk), &g) in out.iter_mut().zip(v).zip(grad) {
                *o = vk - step * g;
            }
        }
        NormKind::LInf => {
            let step = grad.iter().map(|g| g.abs()).sum::<f64>() / (9.0 * l_bar);
            for ((o, &vk), &g) in out.iter_mut().zip(v).zip(grad) {
                *o = if g > 0.0 { vk - step } else { vk + step };
            }
        }
    }
}

pub(crate) fn charge_prox(ops: &mut OpCounter, n: usize, norm: NormKind) {
    match norm {
        NormKind::L2 => {
            ops.mul(n + 1);
            ops.div(1);
            ops.add(n);
        }
        NormKind::LInf => {
            ops.add(2 * n);
            ops.mul(1);
            ops.div(1);
            ops.cmp(2 * n);
        }
    }
}

/// Variance-reduced gradient
/// `μ + (1/B) ∑_{i∈I} (∇φᵢ(v) − ∇φᵢ(ṽ)) / (n pᵢ)`.
pub fn reduced_gradient(
    v: &[f64],
    v_tilde: &[f64],
    mu: &[f64],
    indices: &[usize],
    profile: &SmoothnessProfile,
    prob: &EntropicProblem,
) -> Vec<f64> {
    let weights = profile.sampling_weights();
    let mut scratch = GradScratch::new(v.len());
    let mut out = vec![0.0; v.len()];
    reduced_gradient_into(
        v,
        v_tilde,
        mu,
        indices,
        &weights,
        prob,
        &mut scratch,
        &mut out,
        &mut OpCounter::new(),
    );
    out
}

pub(crate) struct GradScratch {
    at_v: Vec<f64>,
    at_anchor: Vec<f64>,
    correction: Vec<f64>,
}

impl GradScratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            at_v: vec![0.0; n],
            at_anchor: vec![0.0; n],
            correction: vec![0.0; n],
        }
    }
}

/// Batch corrections are summed sequentially in draw order.
#[allow(clippy::too_many_arguments)]
pub(crate) fn reduced_gradient_into(
    v: &[f64],
    v_tilde: &[f64],
    mu: &[f64],
    indices: &[usize],
    sampling_weights: &[f64],
    prob: &EntropicProblem,
    scratch: &mut GradScratch,
    out: &mut [f64],
    ops: &mut OpCounter,
) {
    let n = v.len();
    let inv_eta = 1.0 / prob.eta();
    scratch.correction.iter_mut().for_each(|c| *c = 0.0);
    for &i in indices {
        component_grad_into(i, v, prob, inv_eta, &mut scratch.at_v, ops);
        component_grad_into(i, v_tilde, prob, inv_eta, &mut scratch.at_anchor, ops);
        let w = 1.0 / (n as f64 * sampling_weights[i]);
        for ((c, &a), &b) in scratch
            .correction
            .iter_mut()
            .zip(&scratch.at_v)
            .zip(&scratch.at_anchor)
        {
            *c += w * (a - b);
        }
        ops.mul(n + 1);
        ops.div(1);
        ops.add(2 * n);
    }
    let inv_b = 1.0 / indices.len() as f64;
    for ((o, &m), &c) in out.iter_mut().zip(mu).zip(&scratch.correction) {
        *o = m + c * inv_b;
    }
    ops.div(2);
    ops.mul(n);
    ops.add(n);
}
