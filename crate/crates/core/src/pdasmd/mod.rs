//! Primal-dual accelerated stochastic proximal mirror descent on the
//! entropic OT semi-dual, its mini-batch variant, and the end-to-end
//! approximation pipeline.
//!
//! The mirror map is `w(x) = ½‖x‖₂²` in both geometries, so the mirror and
//! proximal steps have closed forms (see [`mirror_step_z`], [`prox_step_y`]).

mod approx;
mod sampler;
mod solver;
mod steps;

pub use approx::approximate_ot;
pub(crate) use approx::zero_cost_shortcut;
pub use sampler::{sample_components, ComponentSampler};
pub use solver::{
    default_epoch_cap, pdasmd_batch_solve, pdasmd_solve, pdasmd_solve_observed, IterateState,
    SolverConfig,
};
pub use steps::{couple, mirror_step_z, prox_step_y, reduced_gradient, schedule, Schedule};
