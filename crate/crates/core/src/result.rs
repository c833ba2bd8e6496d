use crate::ops::OpCounter;
use crate::params::ApproxParams;
use crate::semidual::DualPoint;
use crate::sinkhorn::ScalingPair;
use crate::types::TransportPlan;

/// Final dual state of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub enum DualState {
    /// Semi-dual anchor `ṽ` of the last epoch.
    Semidual(DualPoint),
    /// Log-domain Sinkhorn scalings.
    Scalings(ScalingPair),
}

/// Output of a single entropic solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub plan: TransportPlan,
    pub dual: DualState,
    /// Epochs for the PDASMD family, coordinate or half-step updates for
    /// the Sinkhorn family.
    pub iterations: usize,
    /// `‖X1 − p′‖₁ + ‖Xᵀ1 − q′‖₁` at every monitoring point.
    pub residual_history: Vec<f64>,
    pub ops: OpCounter,
    /// Whether the stopping rule fired before the iteration cap.
    pub converged: bool,
}

impl SolveResult {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn lambda(&self) -> Option<&DualPoint> {
        match &self.dual {
            DualState::Semidual(l) => Some(l),
            DualState::Scalings(_) => None,
        }
    }
}

/// A feasible coupling of the original marginals produced by one of the
/// approximation pipelines (parameter schedule, entropic solve, rounding).
#[derive(Debug, Clone)]
pub struct Approximation {
    /// Rounded plan in `U(p, q)`.
    pub plan: TransportPlan,
    /// `None` when `‖C‖∞ = 0` and the pipeline short-circuits.
    pub params: Option<ApproxParams>,
    /// `None` when `‖C‖∞ = 0`.
    pub solve: Option<SolveResult>,
    /// Solver plus rounding operations.
    pub ops: OpCounter,
    /// `false` when the entropic solver hit its cap before the stopping
    /// rule fired. The plan is still feasible.
    pub converged: bool,
}

impl Approximation {
    pub fn iterations(&self) -> usize {
        self.solve.as_ref().map_or(0, |s| s.iterations)
    }

    pub fn entropic_residual(&self) -> f64 {
        self.solve.as_ref().map_or(0.0, |s| s.final_residual())
    }
}
