//! Discrete regularized problem, nonlinear solvers and limit drivers.
//!
//! For `0 < ε ≤ 1` the regularized equation
//!
//! ```text
//! β_ε(T_{1/ε} u) + ε arctan u − div(a(x, Du) + F(T_{1/ε} u)) = f
//! ```
//!
//! is discretized with nodal unknowns, edge differences and edge fluxes; the
//! convective flux on an edge is the monotone splitting flux
//! [`ConvectionModel::edge_flux`](crate::ConvectionModel::edge_flux) of
//! `T_{1/ε} u` at its two ends. [`solve_regularized`] solves it by semismooth Newton with Armijo
//! backtracking (Picard fallback), [`continuation_limit`] drives `ε → 0` with
//! warm starts and [`solve_l1`] runs the two-sided data truncation driver.

mod continuation;
mod newton;
mod problem;
mod residual;

pub use continuation::{
    continuation_limit, continuation_limit_from, solve_l1, truncate_data, ContinuationResult, L1Report, L1Run,
    OrderingCheck,
};
pub use newton::solve_regularized;
pub use problem::{DataClass, DeltaCoupling, NewtonConfig, ProblemSpec, SolverConfig};
pub use residual::{assemble_residual, residual_norm};

use alloc::vec::Vec;

/// Nonlinear method that produced an accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    Picard,
}

/// Record of one solve at fixed `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub delta: f64,
    pub method: Method,
    pub iterations: usize,
    /// Final residual in the weighted nodal `L²` norm.
    pub residual: f64,
    /// Residual before the first step and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Step length of every accepted step.
    pub damping_history: Vec<f64>,
    /// Wall-clock seconds; `None` without the `std` feature.
    pub wall_time: Option<f64>,
    pub fallback_used: bool,
}

/// Record of an `ε`-continuation run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub steps: Vec<EpsilonReport>,
    /// `‖u_{ε_k} − u_{ε_{k+1}}‖_{L¹}` for consecutive schedule entries.
    pub cauchy_u: Vec<f64>,
    /// `‖b_{ε_k} − b_{ε_{k+1}}‖_{L¹}`.
    pub cauchy_b: Vec<f64>,
    /// Last Cauchy distance of `u` is below the configured tolerance.
    pub cauchy_converged: bool,
}

impl SolveReport {
    /// Every solve along the schedule met its residual tolerance.
    pub fn all_solves_converged(&self, tol: f64) -> bool {
        !self.steps.is_empty() && self.steps.iter().all(|s| s.residual <= tol)
    }

    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }
}

#[cfg(feature = "std")]
pub(crate) struct Timer(std::time::Instant);

#[cfg(feature = "std")]
impl Timer {
    pub(crate) fn start() -> Self {
        Timer(std::time::Instant::now())
    }

    pub(crate) fn elapsed(&self) -> Option<f64> {
        Some(self.0.elapsed().as_secs_f64())
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct Timer;

#[cfg(not(feature = "std"))]
impl Timer {
    pub(crate) fn start() -> Self {
        Timer
    }

    pub(crate) fn elapsed(&self) -> Option<f64> {
        None
    }
}
