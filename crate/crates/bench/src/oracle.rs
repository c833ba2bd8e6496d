//! Exact optimal transport value for small dense instances.
//!
//! `n = 2` uses the one-parameter closed form; larger instances run the
//! transportation simplex on a spanning-tree basis with Bland's rule.

use std::collections::VecDeque;

use eot_core::{CostMatrix, SimplexVector};

use crate::error::{BenchError, Result};

pub const ORACLE_MAX_N: usize = 32;

const REDUCED_COST_TOL: f64 = 1e-12;

pub fn exact_ot_small(cost: &CostMatrix, p: &SimplexVector, q: &SimplexVector) -> Result<f64> {
    let n = cost.n();
    if n > ORACLE_MAX_N {
        return Err(BenchError::TooLarge { n, max: ORACLE_MAX_N });
    }
    if p.len() != n || q.len() != n {
        return Err(BenchError::Invalid(format!(
            "marginals of length {}/{} for a {n}×{n} cost",
            p.len(),
            q.len()
        )));
    }
    if n == 1 {
        return Ok(cost.get(0, 0));
    }
    if n == 2 {
        return Ok(two_by_two(cost, p, q));
    }
    Ok(TransportSimplex::new(cost, p.as_slice(), q.as_slice()).solve())
}

/// `X₁₁ = t` on `[max(0, p₁+q₁−1), min(p₁, q₁)]`; the cost is affine in `t`.
fn two_by_two(cost: &CostMatrix, p: &SimplexVector, q: &SimplexVector) -> f64 {
    let (p1, q1) = (p[0], q[0]);
    let lo = (p1 + q1 - 1.0).max(0.0);
    let hi = p1.min(q1);
    let value = |t: f64| {
        cost.get(0, 0) * t
            + cost.get(0, 1) * (p1 - t)
            + cost.get(1, 0) * (q1 - t)
            + cost.get(1, 1) * (1.0 - p1 - q1 + t)
    };
    let slope = cost.get(0, 0) - cost.get(0, 1) - cost.get(1, 0) + cost.get(1, 1);
    if slope > 0.0 {
        value(lo)
    } else {
        value(hi)
    }
}

struct TransportSimplex<'a> {
    n: usize,
    cost: &'a CostMatrix,
    flow: Vec<f64>,
    basic: Vec<bool>,
}

impl<'a> TransportSimplex<'a> {
    /// Northwest-corner start; ties keep a zero basic cell so the basis
    /// always has `2n − 1` cells forming a spanning tree.
    fn new(cost: &'a CostMatrix, p: &[f64], q: &[f64]) -> Self {
        let n = cost.n();
        let mut flow = vec![0.0; n * n];
        let mut basic = vec![false; n * n];
        let mut supply = p.to_vec();
        let mut demand = q.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let t = supply[i].min(demand[j]);
            flow[i * n + j] = t;
            basic[i * n + j] = true;
            supply[i] -= t;
            demand[j] -= t;
            if i == n - 1 && j == n - 1 {
                break;
            }
            if (supply[i] <= demand[j] && i < n - 1) || j == n - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { n, cost, flow, basic }
    }

    fn solve(mut self) -> f64 {
        while let Some(enter) = self.entering_cell() {
            self.pivot(enter);
        }
        self.flow
            .iter()
            .zip(self.cost.as_slice())
            .map(|(x, c)| x * c)
            .sum()
    }

    fn neighbours(&self) -> Vec<Vec<(usize, usize)>> {
        // nodes 0..n are rows, n..2n columns; edges carry their cell index
        let n = self.n;
        let mut adj = vec![Vec::new(); 2 * n];
        for cell in (0..n * n).filter(|&k| self.basic[k]) {
            let (i, j) = (cell / n, cell % n);
            adj[i].push((n + j, cell));
            adj[n + j].push((i, cell));
        }
        adj
    }

    /// Row and column potentials with `uᵢ + vⱼ = cᵢⱼ` on basic cells.
    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> Vec<f64> {
        let n = self.n;
        let mut pot = vec![f64::NAN; 2 * n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0]);
        while let Some(node) = queue.pop_front() {
            for &(next, cell) in &adj[node] {
                if pot[next].is_nan() {
                    pot[next] = self.cost.as_slice()[cell] - pot[node];
                    queue.push_back(next);
                }
            }
        }
        pot
    }

    /// Lowest-index cell with negative reduced cost.
    fn entering_cell(&self) -> Option<usize> {
        let n = self.n;
        let pot = self.potentials(&self.neighbours());
        (0..n * n).find(|&k| {
            !self.basic[k] && self.cost.as_slice()[k] - pot[k / n] - pot[n + k % n] < -REDUCED_COST_TOL
        })
    }

    fn pivot(&mut self, enter: usize) {
        let n = self.n;
        let adj = self.neighbours();
        let (start, goal) = (enter / n, n + enter % n);
        // tree path from the entering row to the entering column
        let mut via = vec![usize::MAX; 2 * n];
        let mut parent = vec![usize::MAX; 2 * n];
        parent[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            for &(next, cell) in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    via[next] = cell;
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = goal;
        while node != start {
            path.push(via[node]);
            node = parent[node];
        }
        // path runs goal → start: cells at even positions lose flow
        let losing: Vec<usize> = path.iter().copied().step_by(2).collect();
        let theta = losing.iter().map(|&c| self.flow[c]).fold(f64::INFINITY, f64::min);
        let leave = *losing
            .iter()
            .filter(|&&c| self.flow[c] == theta)
            .min()
            .expect("cycle has a losing cell");
        for (k, &cell) in path.iter().enumerate() {
            if k % 2 == 0 {
                self.flow[cell] -= theta;
            } else {
                self.flow[cell] += theta;
            }
        }
        self.flow[enter] += theta;
        self.flow[leave] = 0.0;
        self.basic[leave] = false;
        self.basic[enter] = true;
    }
}
