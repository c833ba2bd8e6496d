//! Accuracy-driven parameter schedule for the two-step approximation scheme:
//! regularization `η`, marginal-smoothing weight `ε′`, and the smoothing itself.

use crate::error::{OtError, Result};
use crate::types::{CostMatrix, SimplexVector};

/// Parameters derived from a target accuracy `eps` (in cost units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub eps: f64,
    /// `ε / (8‖C‖∞)`
    pub eps_prime: f64,
    /// `ε / (4 ln n)`
    pub eta: f64,
}

/// `η = ε/(4 ln n)`, `ε′ = ε/(8‖C‖∞)`, natural logarithm.
pub fn derive_params(eps: f64, cost: &CostMatrix, n: usize) -> Result<ApproxParams> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(OtError::BadEps(eps));
    }
    if n < 2 {
        return Err(OtError::TooSmallProblem(n));
    }
    if cost.max_abs() <= 0.0 {
        return Err(OtError::ZeroCost);
    }
    Ok(ApproxParams {
        eps,
        eps_prime: eps / (8.0 * cost.max_abs()),
        eta: eps / (4.0 * (n as f64).ln()),
    })
}

/// Shrinks both marginals toward uniform:
/// `(1 − ε′/8)·p + ε′/(8n)·1`, and likewise for `q`.
pub fn smooth_marginals(
    p: &SimplexVector,
    q: &SimplexVector,
    eps_prime: f64,
) -> Result<(SimplexVector, SimplexVector)> {
    if !(eps_prime > 0.0) || !(eps_prime / 8.0 < 1.0) {
        return Err(OtError::BadEpsPrime(eps_prime));
    }
    if p.len() != q.len() {
        return Err(OtError::ShapeMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let n = p.len() as f64;
    let keep = 1.0 - eps_prime / 8.0;
    let floor = eps_prime / (8.0 * n);
    let shrink = |v: &SimplexVector| {
        SimplexVector::from_raw(v.as_slice().iter().map(|&x| keep * x + floor).collect())
    };
    Ok((shrink(p), shrink(q)))
}
