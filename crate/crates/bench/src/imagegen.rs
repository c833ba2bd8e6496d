//! Synthetic grey-scale marginals: a bright square on a dim background.

use eot_core::{CostMatrix, SimplexVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageMarginal {
    pub side: usize,
    /// Raw intensities, row-major.
    pub pixels: Vec<f64>,
    pub normalized: SimplexVector,
    /// `(row, col, side)` of the foreground square.
    pub foreground: (usize, usize, usize),
}

/// Foreground side `floor(s·√0.2)`, at least one pixel.
pub fn foreground_side(side: usize) -> usize {
    ((side as f64 * 0.2f64.sqrt()).floor() as usize).max(1)
}

/// # Panics
/// If `side < 2`.
pub fn gen_synthetic_image(side: usize, seed: u64) -> ImageMarginal {
    assert!(side >= 2, "image side must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fg = foreground_side(side);
    let top = rng.gen_range(0..=side - fg);
    let left = rng.gen_range(0..=side - fg);
    let mut pixels = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let inside = (top..top + fg).contains(&r) && (left..left + fg).contains(&c);
            let hi = if inside { 3.0 } else { 1.0 };
            pixels.push(rng.gen_range(0.0..hi));
        }
    }
    let n = pixels.len() as f64;
    let total: f64 = pixels.iter().sum();
    // tiny uniform floor keeps every pixel strictly positive
    let floor = 1e-6 / n;
    let mass: Vec<f64> = pixels.iter().map(|&x| x / total + floor).collect();
    let normalized = SimplexVector::normalized(mass).expect("positive finite mass");
    ImageMarginal {
        side,
        pixels,
        normalized,
        foreground: (top, left, fg),
    }
}

/// ℓ₁ grid distance between pixel locations.
pub fn grid_cost(side: usize) -> CostMatrix {
    let n = side * side;
    CostMatrix::from_fn(n, |a, b| {
        let (ra, ca) = ((a / side) as f64, (a % side) as f64);
        let (rb, cb) = ((b / side) as f64, (b % side) as f64);
        (ra - rb).abs() + (ca - cb).abs()
    })
    .expect("grid distances are finite")
}

pub fn image_pair_to_problem(
    a: &ImageMarginal,
    b: &ImageMarginal,
) -> Result<(SimplexVector, SimplexVector, CostMatrix)> {
    if a.side != b.side {
        return Err(BenchError::ShapeMismatch(a.side, b.side));
    }
    Ok((a.normalized.clone(), b.normalized.clone(), grid_cost(a.side)))
}

/// Two images drawn from independent streams of one experiment seed.
pub fn image_pair(side: usize, seed: u64) -> (ImageMarginal, ImageMarginal) {
    let base = seed.wrapping_mul(2);
    (gen_synthetic_image(side, base), gen_synthetic_image(side, base.wrapping_add(1)))
}
