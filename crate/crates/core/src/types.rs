//! Domain types shared by every solver: probability vectors, cost matrices,
//! transport plans and the entropic problem instance.

use serde::Serialize;

use crate::error::{OtError, Result};

/// Absolute tolerance on the total mass of a [`SimplexVector`].
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A nonnegative vector whose entries sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates membership in the probability simplex. Never renormalizes.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(OtError::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(OtError::NegativeEntry { index, value });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(OtError::SumNotOne { sum });
        }
        Ok(Self(values))
    }

    /// Uniform distribution over `n` atoms.
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Normalizes a nonnegative vector with positive mass. Used by data
    /// generators, not by validation paths.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let total: f64 = values.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(OtError::SumNotOne { sum: total });
        }
        Self::new(values.into_iter().map(|v| v / total).collect())
    }

    /// Wraps values that are known to lie in the simplex up to rounding.
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|&v| v >= 0.0));
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Square nonnegative ground-cost matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
    max_abs: f64,
}

impl CostMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(OtError::ShapeMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        let mut max_abs: f64 = 0.0;
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(OtError::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(OtError::NegativeEntry { index, value });
            }
            max_abs = max_abs.max(value);
        }
        Ok(Self {
            n,
            entries,
            max_abs,
        })
    }

    /// Builds a cost matrix from a function of the index pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `‖C‖∞`, the largest entry.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// Nonnegative coupling matrix, row-major.
///
/// Only nonnegativity and finiteness are enforced on construction: Sinkhorn
/// scalings legitimately produce unnormalized intermediate plans. Use
/// [`TransportPlan::total_mass`] where a mass bound matters.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TransportPlan {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(OtError::ShapeMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(OtError::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(OtError::NegativeEntry { index, value });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn square(n: usize, entries: Vec<f64>) -> Result<Self> {
        Self::new(n, n, entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: vec![0.0; n * n],
        }
    }

    /// The independent coupling `p qᵀ`.
    pub fn outer(p: &SimplexVector, q: &SimplexVector) -> Self {
        let mut entries = Vec::with_capacity(p.len() * q.len());
        for &pi in p.as_slice() {
            entries.extend(q.as_slice().iter().map(|&qj| pi * qj));
        }
        Self {
            rows: p.len(),
            cols: q.len(),
            entries,
        }
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries
            .chunks_exact(self.cols)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for r in self.entries.chunks_exact(self.cols) {
            for (s, &x) in sums.iter_mut().zip(r) {
                *s += x;
            }
        }
        sums
    }
}

/// An entropic OT instance: cost, strictly positive marginals and the
/// regularization strength `eta`.
#[derive(Debug, Clone)]
pub struct EntropicProblem {
    cost: CostMatrix,
    row_marginal: SimplexVector,
    col_marginal: SimplexVector,
    eta: f64,
}

impl EntropicProblem {
    pub fn new(
        cost: CostMatrix,
        row_marginal: SimplexVector,
        col_marginal: SimplexVector,
        eta: f64,
    ) -> Result<Self> {
        let n = cost.n();
        for len in [row_marginal.len(), col_marginal.len()] {
            if len != n {
                return Err(OtError::ShapeMismatch { expected: n, got: len });
            }
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(OtError::BadEta(eta));
        }
        if row_marginal.min() <= 0.0 || col_marginal.min() <= 0.0 {
            return Err(OtError::NonPositiveMarginal);
        }
        Ok(Self {
            cost,
            row_marginal,
            col_marginal,
            eta,
        })
    }

    pub fn n(&self) -> usize {
        self.cost.n()
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    /// Smoothed row marginal `p′`.
    pub fn p(&self) -> &SimplexVector {
        &self.row_marginal
    }

    /// Smoothed column marginal `q′`.
    pub fn q(&self) -> &SimplexVector {
        &self.col_marginal
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_accepts_uniform() {
        let s = SimplexVector::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn simplex_rejects_sum_just_outside_tolerance() {
        let err = SimplexVector::new(vec![0.3, 0.700_000_000_2]).unwrap_err();
        assert!(matches!(err, OtError::SumNotOne { .. }));
    }

    #[test]
    fn simplex_rejects_negative() {
        let err = SimplexVector::new(vec![-0.1, 1.1]).unwrap_err();
        assert!(matches!(err, OtError::NegativeEntry { index: 0, .. }));
    }

    #[test]
    fn simplex_rejects_nan() {
        assert!(SimplexVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn cost_caches_max() {
        let c = CostMatrix::new(2, vec![0.0, 3.0, 1.0, 0.0]).unwrap();
        assert_eq!(c.max_abs(), 3.0);
        assert!(CostMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0]).is_err());
        assert!(CostMatrix::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn problem_requires_positive_marginals_and_eta() {
        let c = CostMatrix::new(2, vec![0.0; 4]).unwrap();
        let u = SimplexVector::uniform(2);
        let pt = SimplexVector::new(vec![1.0, 0.0]).unwrap();
        assert!(EntropicProblem::new(c.clone(), u.clone(), u.clone(), 0.0).is_err());
        assert!(matches!(
            EntropicProblem::new(c.clone(), pt, u.clone(), 1.0),
            Err(OtError::NonPositiveMarginal)
        ));
        assert!(EntropicProblem::new(c, u.clone(), u, 1.0).is_ok());
    }

    #[test]
    fn plan_sums() {
        let x = TransportPlan::square(2, vec![0.3, 0.0, 0.2, 0.5]).unwrap();
        assert_eq!(x.row_sums(), vec![0.3, 0.7]);
        assert_eq!(x.col_sums(), vec![0.5, 0.5]);
        assert!((x.total_mass() - 1.0).abs() < 1e-15);
    }
}
