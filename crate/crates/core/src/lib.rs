//! Entropy-regularized optimal transport between discrete distributions.
//!
//! Solvers:
//! * [`approximate_ot`]: accelerated variance-reduced stochastic mirror
//!   descent on the semi-dual, optionally with mini-batches;
//! * [`approximate_ot_sinkhorn`]: classical alternating Sinkhorn;
//! * [`approximate_ot_stochastic`]: greedy-randomized Sinkhorn.
//!
//! Each wrapper smooths the marginals, solves the regularized problem to a
//! marginal tolerance and rounds the result onto the transport polytope.
//! All solvers report an [`OpCounter`] of arithmetic operations.

// negated comparisons below reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
mod kernels;
pub mod objective;
pub mod ops;
pub mod params;
pub mod pdasmd;
pub mod result;
pub mod rounding;
pub mod semidual;
pub mod sinkhorn;
pub mod types;

pub use error::{OtError, Result};
pub use objective::{entropy, marginal_residual, transport_cost};
pub use ops::OpCounter;
pub use params::{derive_params, smooth_marginals, ApproxParams};
pub use pdasmd::{approximate_ot, pdasmd_batch_solve, pdasmd_solve, SolverConfig};
pub use result::{Approximation, DualState, SolveResult};
pub use rounding::round_to_feasible;
pub use semidual::{DualPoint, NormKind};
pub use sinkhorn::{
    approximate_ot_sinkhorn, approximate_ot_stochastic, sinkhorn_solve, stochastic_sinkhorn_solve, ScalingPair,
};
pub use types::{CostMatrix, EntropicProblem, SimplexVector, TransportPlan};
