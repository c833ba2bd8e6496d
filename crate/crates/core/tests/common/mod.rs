#![allow(dead_code)]

use eot_core::{CostMatrix, DualPoint, EntropicProblem, SimplexVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> SimplexVector {
    SimplexVector::normalized((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (CostMatrix, SimplexVector, SimplexVector) {
    let cost = CostMatrix::from_fn(n, |_, _| rng.gen_range(0.0..1.0)).unwrap();
    (cost, random_simplex(rng, n), random_simplex(rng, n))
}

pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, eta: f64) -> EntropicProblem {
    let (cost, p, q) = random_instance(rng, n);
    EntropicProblem::new(cost, p, q, eta).unwrap()
}

pub fn random_dual(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DualPoint {
    DualPoint((0..n).map(|_| rng.gen_range(-scale..scale)).collect())
}

pub fn swap_instance() -> (CostMatrix, SimplexVector, SimplexVector) {
    (
        CostMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap(),
        SimplexVector::new(vec![0.3, 0.7]).unwrap(),
        SimplexVector::uniform(2),
    )
}
