//! Primal objective pieces: entropy, linear transport cost, marginal residual.

use crate::error::{OtError, Result};
use crate::ops::OpCounter;
use crate::types::{CostMatrix, SimplexVector, TransportPlan};

/// `H(X) = −∑ X_ij log X_ij` with `0 log 0 = 0`.
pub fn entropy(x: &TransportPlan) -> f64 {
    -x.as_slice()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// Frobenius inner product `⟨C, X⟩`.
pub fn transport_cost(cost: &CostMatrix, x: &TransportPlan) -> Result<f64> {
    check_square(cost.n(), x)?;
    Ok(cost
        .as_slice()
        .iter()
        .zip(x.as_slice())
        .map(|(c, v)| c * v)
        .sum())
}

/// `‖X1 − p‖₁ + ‖Xᵀ1 − q‖₁`.
pub fn marginal_residual(x: &TransportPlan, p: &SimplexVector, q: &SimplexVector) -> Result<f64> {
    if x.rows() != p.len() {
        return Err(OtError::ShapeMismatch {
            expected: p.len(),
            got: x.rows(),
        });
    }
    if x.cols() != q.len() {
        return Err(OtError::ShapeMismatch {
            expected: q.len(),
            got: x.cols(),
        });
    }
    Ok(l1_distance(&x.row_sums(), p.as_slice()) + l1_distance(&x.col_sums(), q.as_slice()))
}

/// Entropic objective `⟨C, X⟩ − η H(X)`, counted.
pub(crate) fn entropic_objective_counted(
    cost: &CostMatrix,
    x: &TransportPlan,
    eta: f64,
    ops: &mut OpCounter,
) -> f64 {
    let mut linear = 0.0;
    let mut neg_entropy = 0.0;
    for (&c, &v) in cost.as_slice().iter().zip(x.as_slice()) {
        linear += c * v;
        if v > 0.0 {
            neg_entropy += v * v.ln();
        }
    }
    let m = x.as_slice().len();
    ops.mul(2 * m + 1);
    ops.add(2 * m + 1);
    ops.log(m);
    ops.cmp(m);
    linear + eta * neg_entropy
}

/// Marginal residual from precomputed sums, counted.
pub(crate) fn residual_from_sums_counted(
    rows: &[f64],
    cols: &[f64],
    p: &[f64],
    q: &[f64],
    ops: &mut OpCounter,
) -> f64 {
    ops.add(2 * (rows.len() + cols.len()) + 1);
    l1_distance(rows, p) + l1_distance(cols, q)
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn check_square(n: usize, x: &TransportPlan) -> Result<()> {
    if x.rows() != n || x.cols() != n {
        return Err(OtError::ShapeMismatch {
            expected: n * n,
            got: x.rows() * x.cols(),
        });
    }
    Ok(())
}
