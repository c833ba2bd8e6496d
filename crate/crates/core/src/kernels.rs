//! Max-shifted log-sum-exp and softmax over rows of `(λ − C_i·)/η`.

use crate::ops::OpCounter;

/// Writes `(λ_j − c_j)/η` into `out` and returns the row maximum.
#[inline]
pub(crate) fn scores_into(lambda: &[f64], cost_row: &[f64], inv_eta: f64, out: &mut [f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for ((o, &l), &c) in out.iter_mut().zip(lambda).zip(cost_row) {
        let s = (l - c) * inv_eta;
        *o = s;
        if s > max {
            max = s;
        }
    }
    max
}

/// Overwrites `scores` with `softmax(scores)` and returns `log ∑ exp(scores)`.
#[inline]
pub(crate) fn softmax_in_place(scores: &mut [f64], max: f64) -> f64 {
    let mut total = 0.0;
    for s in scores.iter_mut() {
        let e = (*s - max).exp();
        *s = e;
        total += e;
    }
    let inv = 1.0 / total;
    for s in scores.iter_mut() {
        *s *= inv;
    }
    max + total.ln()
}

/// Returns `log ∑ exp(scores)` without modifying `scores`.
#[inline]
pub(crate) fn log_sum_exp(scores: &[f64], max: f64) -> f64 {
    let total: f64 = scores.iter().map(|&s| (s - max).exp()).sum();
    max + total.ln()
}

/// Op charge for one `scores_into` + `softmax_in_place` over a row of length `n`.
#[inline]
pub(crate) fn charge_softmax(ops: &mut OpCounter, n: usize) {
    // scores: sub + mul; max: compare
    ops.add(n);
    ops.mul(n);
    ops.cmp(n);
    // shift, exp, accumulate
    ops.add(2 * n);
    ops.exp(n);
    // normalize
    ops.div(1);
    ops.mul(n);
    // log of the total plus the max
    ops.log(1);
    ops.add(1);
}
