use rand::Rng;

use crate::ops::OpCounter;
use crate::semidual::SmoothnessProfile;

/// Inverse-CDF sampler over component indices with probabilities
/// `Lᵢ/(n L̄)`.
#[derive(Debug, Clone)]
pub struct ComponentSampler {
    cumulative: Vec<f64>,
    probs: Vec<f64>,
    search_depth: usize,
}

impl ComponentSampler {
    pub fn new(profile: &SmoothnessProfile) -> Self {
        Self::from_weights(profile.sampling_weights())
    }

    pub fn from_weights(probs: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|&w| {
                acc += w;
                acc
            })
            .collect::<Vec<_>>();
        let search_depth = (usize::BITS - probs.len().leading_zeros()) as usize;
        Self {
            cumulative,
            probs,
            search_depth,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// One draw; consumes exactly one `f64` from the stream.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty weights");
        let u = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }

    pub(crate) fn draw_counted<R: Rng + ?Sized>(&self, rng: &mut R, ops: &mut OpCounter) -> usize {
        ops.mul(1);
        ops.cmp(self.search_depth);
        self.draw(rng)
    }
}

/// Draws `batch` indices i.i.d. (with replacement).
pub fn sample_components<R: Rng + ?Sized>(
    profile: &SmoothnessProfile,
    batch: usize,
    rng: &mut R,
) -> Vec<usize> {
    let sampler = ComponentSampler::new(profile);
    (0..batch).map(|_| sampler.draw(rng)).collect()
}
