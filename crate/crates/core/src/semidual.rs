//! Semi-dual of the entropic OT problem.
//!
//! Eliminating the row multipliers `τ` in closed form leaves a smooth
//! finite-sum objective of the column multipliers `λ`:
//!
//! ```text
//! φ(λ)  = η − ⟨q′, λ⟩ − η ∑ p′ᵢ log p′ᵢ + η ∑ᵢ p′ᵢ log ∑ⱼ exp((λⱼ − Cᵢⱼ − η)/η)
//!       = (1/n) ∑ᵢ φᵢ(λ)
//! φᵢ(λ) = n p′ᵢ [ −⟨q′, λ⟩ − η log p′ᵢ + η log ∑ⱼ exp((λⱼ − Cᵢⱼ − η)/η) + η ]
//! ```
//!
//! The primal plan attached to `λ` is `Xᵢⱼ = p′ᵢ · softmaxⱼ((λ − Cᵢ·)/η)`, so
//! its rows match `p′` exactly and `Xᵀ1 − q′ = ∇φ(λ)`.
//!
//! The constraint operator `A` is never formed; row and column sums play
//! its role.

use crate::error::{OtError, Result};
use crate::kernels::{charge_softmax, log_sum_exp, scores_into, softmax_in_place};
use crate::ops::OpCounter;
use crate::types::{EntropicProblem, TransportPlan};

/// Column multipliers `λ` of the semi-dual.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint(pub Vec<f64>);

impl DualPoint {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Geometry in which the dual components are smooth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L2,
    LInf,
}

impl NormKind {
    /// Multiplier on `n p′ᵢ / η` in the component smoothness constant.
    pub fn smoothness_factor(self) -> f64 {
        match self {
            NormKind::L2 => 1.0,
            NormKind::LInf => 5.0,
        }
    }
}

/// Component smoothness constants `Lᵢ` and their mean `L̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessProfile {
    pub per_component: Vec<f64>,
    pub mean: f64,
    pub norm_kind: NormKind,
}

impl SmoothnessProfile {
    /// Importance-sampling probabilities `Lᵢ / (n L̄)`.
    pub fn sampling_weights(&self) -> Vec<f64> {
        let scale = 1.0 / (self.per_component.len() as f64 * self.mean);
        self.per_component.iter().map(|&l| l * scale).collect()
    }
}

/// `Lᵢ = n p′ᵢ/η` for ℓ₂ and `5 n p′ᵢ/η` for ℓ∞. The mean is computed from
/// the constants, so it equals `1/η` (resp. `5/η`) up to rounding.
pub fn smoothness_constants(prob: &EntropicProblem, norm_kind: NormKind) -> SmoothnessProfile {
    let n = prob.n() as f64;
    let scale = norm_kind.smoothness_factor() * n / prob.eta();
    let per_component: Vec<f64> = prob.p().as_slice().iter().map(|&p| scale * p).collect();
    let mean = per_component.iter().sum::<f64>() / n;
    SmoothnessProfile {
        per_component,
        mean,
        norm_kind,
    }
}

/// `τᵢ(λ) = η log p′ᵢ − η log ∑ⱼ exp((λⱼ − Cᵢⱼ − η)/η)`.
pub fn tau_of_lambda(lambda: &DualPoint, prob: &EntropicProblem) -> Vec<f64> {
    let n = prob.n();
    let eta = prob.eta();
    let inv_eta = 1.0 / eta;
    let mut scores = vec![0.0; n];
    (0..n)
        .map(|i| {
            let max = scores_into(&lambda.0, prob.cost().row(i), inv_eta, &mut scores);
            let lse = log_sum_exp(&scores, max) - 1.0;
            eta * prob.p()[i].ln() - eta * lse
        })
        .collect()
}

/// Semi-dual objective `φ(λ)` in its `p′`-weighted form.
pub fn semidual_value(lambda: &DualPoint, prob: &EntropicProblem) -> f64 {
    let n = prob.n();
    let eta = prob.eta();
    let inv_eta = 1.0 / eta;
    let p = prob.p().as_slice();
    let mut scores = vec![0.0; n];
    let mut weighted_lse = 0.0;
    for i in 0..n {
        let max = scores_into(&lambda.0, prob.cost().row(i), inv_eta, &mut scores);
        weighted_lse += p[i] * (log_sum_exp(&scores, max) - 1.0);
    }
    let q_dot: f64 = prob.q().as_slice().iter().zip(&lambda.0).map(|(q, l)| q * l).sum();
    let p_log_p: f64 = p.iter().map(|&x| x * x.ln()).sum();
    eta - q_dot - eta * p_log_p + eta * weighted_lse
}

/// Single component `φᵢ(λ)`; `(1/n)∑ᵢ φᵢ = φ`.
pub fn semidual_component_value(i: usize, lambda: &DualPoint, prob: &EntropicProblem) -> Result<f64> {
    let n = prob.n();
    check_index(i, n)?;
    let eta = prob.eta();
    let mut scores = vec![0.0; n];
    let max = scores_into(&lambda.0, prob.cost().row(i), 1.0 / eta, &mut scores);
    let lse = log_sum_exp(&scores, max) - 1.0;
    let pi = prob.p()[i];
    let q_dot: f64 = prob.q().as_slice().iter().zip(&lambda.0).map(|(q, l)| q * l).sum();
    Ok(n as f64 * pi * (-q_dot - eta * pi.ln() + eta * lse + eta))
}

/// `∇φᵢ(λ) = n p′ᵢ (−q′ + softmax((λ − Cᵢ·)/η))`.
pub fn semidual_component_grad(i: usize, lambda: &DualPoint, prob: &EntropicProblem) -> Result<Vec<f64>> {
    check_index(i, prob.n())?;
    let mut out = vec![0.0; prob.n()];
    component_grad_into(i, &lambda.0, prob, 1.0 / prob.eta(), &mut out, &mut OpCounter::new());
    Ok(out)
}

/// Full gradient `∇φ(λ) = −q′ + ∑ᵢ p′ᵢ softmax((λ − Cᵢ·)/η)`.
pub fn semidual_full_grad(lambda: &DualPoint, prob: &EntropicProblem) -> Vec<f64> {
    value_and_grad_counted(&lambda.0, prob, &mut OpCounter::new()).1
}

/// Plan `X(λ)` with rows `p′ᵢ · softmax((λ − Cᵢ·)/η)`.
pub fn primal_from_dual(lambda: &DualPoint, prob: &EntropicProblem) -> TransportPlan {
    primal_from_dual_counted(&lambda.0, prob, &mut OpCounter::new())
}

pub(crate) fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(OtError::IndexOutOfRange { index: i, n });
    }
    Ok(())
}

/// Writes `∇φᵢ(λ)` into `out`.
pub(crate) fn component_grad_into(
    i: usize,
    lambda: &[f64],
    prob: &EntropicProblem,
    inv_eta: f64,
    out: &mut [f64],
    ops: &mut OpCounter,
) {
    let n = lambda.len();
    let max = scores_into(lambda, prob.cost().row(i), inv_eta, out);
    softmax_in_place(out, max);
    let scale = n as f64 * prob.p()[i];
    for (o, &q) in out.iter_mut().zip(prob.q().as_slice()) {
        *o = scale * (*o - q);
    }
    charge_softmax(ops, n);
    ops.mul(n + 1);
    ops.add(n);
}

/// One pass over all rows returning `(φ(λ), ∇φ(λ))`.
pub(crate) fn value_and_grad_counted(
    lambda: &[f64],
    prob: &EntropicProblem,
    ops: &mut OpCounter,
) -> (f64, Vec<f64>) {
    let n = lambda.len();
    let eta = prob.eta();
    let inv_eta = 1.0 / eta;
    let p = prob.p().as_slice();
    let q = prob.q().as_slice();
    let mut grad: Vec<f64> = q.iter().map(|&x| -x).collect();
    let mut row = vec![0.0; n];
    let mut weighted_lse = 0.0;
    for i in 0..n {
        let max = scores_into(lambda, prob.cost().row(i), inv_eta, &mut row);
        let lse = softmax_in_place(&mut row, max) - 1.0;
        weighted_lse += p[i] * lse;
        for (g, &s) in grad.iter_mut().zip(&row) {
            *g += p[i] * s;
        }
    }
    let q_dot: f64 = q.iter().zip(lambda).map(|(a, b)| a * b).sum();
    let p_log_p: f64 = p.iter().map(|&x| x * x.ln()).sum();
    ops.div(1);
    for _ in 0..n {
        charge_softmax(ops, n);
    }
    // row blend into the gradient, weighted lse
    ops.mul(n * n + n);
    ops.add(n * n + 2 * n);
    // ⟨q′,λ⟩, ∑p′ log p′, final combination
    ops.mul(2 * n + 2);
    ops.add(2 * n + 3);
    ops.log(n);
    (eta - q_dot - eta * p_log_p + eta * weighted_lse, grad)
}

pub(crate) fn primal_from_dual_counted(
    lambda: &[f64],
    prob: &EntropicProblem,
    ops: &mut OpCounter,
) -> TransportPlan {
    let n = lambda.len();
    let inv_eta = 1.0 / prob.eta();
    let mut entries = vec![0.0; n * n];
    for (i, row) in entries.chunks_exact_mut(n).enumerate() {
        let max = scores_into(lambda, prob.cost().row(i), inv_eta, row);
        softmax_in_place(row, max);
        let pi = prob.p()[i];
        for x in row.iter_mut() {
            *x *= pi;
        }
    }
    ops.div(1);
    for _ in 0..n {
        charge_softmax(ops, n);
    }
    ops.mul(n * n);
    TransportPlan::from_raw(n, n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{CostMatrix, SimplexVector};
    use approx::assert_abs_diff_eq;

    fn problem(cost: Vec<f64>, p: Vec<f64>, q: Vec<f64>, eta: f64) -> EntropicProblem {
        let n = p.len();
        EntropicProblem::new(
            CostMatrix::new(n, cost).unwrap(),
            SimplexVector::new(p).unwrap(),
            SimplexVector::new(q).unwrap(),
            eta,
        )
        .unwrap()
    }

    #[test]
    fn tau_hand_value() {
        let prob = problem(vec![0.0; 4], vec![0.5, 0.5], vec![0.5, 0.5], 1.0);
        let tau = tau_of_lambda(&DualPoint::zeros(2), &prob);
        let expected = 1.0 - 2.0 * 2f64.ln();
        assert_abs_diff_eq!(expected, -0.386_294_4, epsilon = 1e-7);
        for t in tau {
            assert_abs_diff_eq!(t, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn tau_shifts_against_lambda_and_survives_huge_values() {
        let prob = problem(vec![0.0, 1.0, 2.0, 0.5], vec![0.4, 0.6], vec![0.3, 0.7], 0.3);
        let lam = DualPoint(vec![0.2, -0.4]);
        let shifted = DualPoint(vec![1.7, 1.1]);
        for (a, b) in tau_of_lambda(&lam, &prob).iter().zip(tau_of_lambda(&shifted, &prob)) {
            assert_abs_diff_eq!(a - 1.5, b, epsilon = 1e-12);
        }
        let wild = DualPoint(vec![1e6, -1e6]);
        assert!(tau_of_lambda(&wild, &prob).iter().all(|t| t.is_finite()));
    }

    #[test]
    fn value_hand_case_and_translation_invariance() {
        let prob = problem(vec![0.0; 4], vec![0.5, 0.5], vec![0.5, 0.5], 1.0);
        assert_abs_diff_eq!(semidual_value(&DualPoint::zeros(2), &prob), 2.0 * 2f64.ln(), epsilon = 1e-14);

        let prob = problem(vec![0.0, 1.0, 2.0, 0.5], vec![0.4, 0.6], vec![0.3, 0.7], 0.3);
        let a = semidual_value(&DualPoint(vec![0.2, -0.4]), &prob);
        let b = semidual_value(&DualPoint(vec![3.2, 2.6]), &prob);
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }

    #[test]
    fn value_equals_mean_of_components() {
        let prob = problem(vec![0.0, 1.0, 2.0, 0.5], vec![0.4, 0.6], vec![0.3, 0.7], 0.3);
        let lam = DualPoint(vec![0.2, -0.4]);
        let mean = (0..2)
            .map(|i| semidual_component_value(i, &lam, &prob).unwrap())
            .sum::<f64>()
            / 2.0;
        assert_abs_diff_eq!(mean, semidual_value(&lam, &prob), epsilon = 1e-10);
    }

    #[test]
    fn component_grad_constant_row() {
        let prob = problem(vec![0.0; 4], vec![0.3, 0.7], vec![0.5, 0.5], 0.7);
        let g = semidual_component_grad(0, &DualPoint::zeros(2), &prob).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        assert!(matches!(
            semidual_component_grad(2, &DualPoint::zeros(2), &prob),
            Err(OtError::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn full_grad_uniform_softmax() {
        let prob = problem(vec![0.0; 4], vec![0.5, 0.5], vec![0.3, 0.7], 0.2);
        let g = semidual_full_grad(&DualPoint::zeros(2), &prob);
        assert_abs_diff_eq!(g[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], -0.2, epsilon = 1e-15);
    }

    #[test]
    fn primal_of_zero_cost_is_outer_with_uniform() {
        let prob = problem(vec![0.0; 9], vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5], 0.5);
        let x = primal_from_dual(&DualPoint::zeros(3), &prob);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(x.get(i, j), prob.p()[i] / 3.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn smoothness_examples() {
        let prob = problem(vec![0.0, 1.0, 1.0, 0.0], vec![0.5, 0.5], vec![0.5, 0.5], 0.1);
        let inf = smoothness_constants(&prob, NormKind::LInf);
        assert_abs_diff_eq!(inf.per_component[0], 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(inf.mean, 50.0, epsilon = 1e-12);
        let two = smoothness_constants(&prob, NormKind::L2);
        assert_abs_diff_eq!(two.per_component[1], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(two.mean, 10.0, epsilon = 1e-12);

        let prob = problem(vec![0.0; 9], vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5], 0.37);
        for kind in [NormKind::L2, NormKind::LInf] {
            let prof = smoothness_constants(&prob, kind);
            for (w, p) in prof.sampling_weights().iter().zip(prob.p().as_slice()) {
                assert_abs_diff_eq!(*w, *p, epsilon = 1e-15);
            }
        }
    }
}
