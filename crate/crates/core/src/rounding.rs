//! Rounding of a nonnegative near-coupling onto the transport polytope
//! `U(p, q)`: clip rows, clip columns, then restore the missing mass with a
//! rank-one correction.

use crate::error::{OtError, Result};
use crate::ops::OpCounter;
use crate::types::{SimplexVector, TransportPlan};

/// Returns `X̂` with `X̂1 = p`, `X̂ᵀ1 = q`, `X̂ ≥ 0` and
/// `‖X̂ − X‖₁ ≤ 2(‖X1 − p‖₁ + ‖Xᵀ1 − q‖₁)`.
pub fn round_to_feasible(x: &TransportPlan, p: &SimplexVector, q: &SimplexVector) -> Result<TransportPlan> {
    round_counted(x, p, q, &mut OpCounter::new())
}

pub(crate) fn round_counted(
    x: &TransportPlan,
    p: &SimplexVector,
    q: &SimplexVector,
    ops: &mut OpCounter,
) -> Result<TransportPlan> {
    let (rows, cols) = (x.rows(), x.cols());
    if rows != p.len() {
        return Err(OtError::ShapeMismatch { expected: p.len(), got: rows });
    }
    if cols != q.len() {
        return Err(OtError::ShapeMismatch { expected: q.len(), got: cols });
    }
    let mut out = x.clone();
    let m = rows * cols;

    let row_sums = out.row_sums();
    for (i, row) in out.as_mut_slice().chunks_exact_mut(cols).enumerate() {
        let factor = clip_factor(p[i], row_sums[i]);
        if factor < 1.0 {
            row.iter_mut().for_each(|v| *v *= factor);
        }
    }
    ops.add(m);
    ops.div(rows);
    ops.cmp(2 * rows);
    ops.mul(m);

    let col_sums = out.col_sums();
    let col_factors: Vec<f64> = (0..cols).map(|j| clip_factor(q[j], col_sums[j])).collect();
    for row in out.as_mut_slice().chunks_exact_mut(cols) {
        for (v, &f) in row.iter_mut().zip(&col_factors) {
            *v *= f;
        }
    }
    ops.add(m);
    ops.div(cols);
    ops.cmp(2 * cols);
    ops.mul(m);

    let err_p: Vec<f64> = out
        .row_sums()
        .iter()
        .zip(p.as_slice())
        .map(|(r, t)| (t - r).max(0.0))
        .collect();
    let err_q: Vec<f64> = out
        .col_sums()
        .iter()
        .zip(q.as_slice())
        .map(|(c, t)| (t - c).max(0.0))
        .collect();
    let mass: f64 = err_p.iter().sum();
    ops.add(2 * m + 2 * (rows + cols) + rows);
    ops.cmp(rows + cols);
    if mass > 0.0 {
        let inv = 1.0 / mass;
        for (row, &ep) in out.as_mut_slice().chunks_exact_mut(cols).zip(&err_p) {
            let w = ep * inv;
            for (v, &eq) in row.iter_mut().zip(&err_q) {
                *v += w * eq;
            }
        }
        ops.div(1);
        ops.mul(rows + m);
        ops.add(m);
    }
    Ok(out)
}

fn clip_factor(target: f64, sum: f64) -> f64 {
    if sum > 0.0 {
        (target / sum).min(1.0)
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::marginal_residual;
    use approx::assert_abs_diff_eq;

    fn plan(n: usize, v: &[f64]) -> TransportPlan {
        TransportPlan::square(n, v.to_vec()).unwrap()
    }

    #[test]
    fn hand_executed_example() {
        let u = SimplexVector::uniform(2);
        let out = round_to_feasible(&plan(2, &[0.5, 0.0, 0.0, 0.3]), &u, &u).unwrap();
        let expected = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in out.as_slice().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn feasible_input_is_unchanged() {
        let p = SimplexVector::new(vec![0.3, 0.7]).unwrap();
        let q = SimplexVector::new(vec![0.5, 0.5]).unwrap();
        let x = plan(2, &[0.3, 0.0, 0.2, 0.5]);
        let out = round_to_feasible(&x, &p, &q).unwrap();
        for (a, b) in out.as_slice().iter().zip(x.as_slice()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_plan_becomes_independent_coupling() {
        let p = SimplexVector::new(vec![0.2, 0.8]).unwrap();
        let q = SimplexVector::new(vec![0.6, 0.4]).unwrap();
        let out = round_to_feasible(&TransportPlan::zeros(2), &p, &q).unwrap();
        let outer = TransportPlan::outer(&p, &q);
        for (a, b) in out.as_slice().iter().zip(outer.as_slice()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_row_gets_its_mass_back() {
        let p = SimplexVector::new(vec![0.5, 0.5]).unwrap();
        let q = SimplexVector::new(vec![0.5, 0.5]).unwrap();
        let out = round_to_feasible(&plan(2, &[0.0, 0.0, 0.9, 0.4]), &p, &q).unwrap();
        assert!(marginal_residual(&out, &p, &q).unwrap() <= 1e-12);
        assert!(out.as_slice().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn shape_mismatch() {
        let p = SimplexVector::uniform(3);
        assert!(round_to_feasible(&TransportPlan::zeros(2), &p, &p).is_err());
    }
}
