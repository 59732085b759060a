use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::{AnisotropicExponents, ConvectionModel, FluxModel};
use crate::graph::MonotoneGraph;
use crate::grid::{Grid, GridFunction};

/// Integrability class declared for the source term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataClass {
    /// `f ∈ L^∞`: solved by ε-continuation directly.
    Bounded,
    /// `f ∈ L¹`: solved through two-sided truncations `f_{m,n}`.
    Integrable,
}

/// One instance of the stationary problem on a grid.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    grid: Grid,
    exponents: AnisotropicExponents,
    beta: MonotoneGraph,
    flux: Arc<dyn FluxModel>,
    convection: ConvectionModel,
    source: GridFunction,
    source_class: DataClass,
}

impl ProblemSpec {
    pub fn new(
        beta: MonotoneGraph,
        flux: Arc<dyn FluxModel>,
        convection: ConvectionModel,
        source: GridFunction,
        source_class: DataClass,
    ) -> Result<Self> {
        let grid = source.grid().clone();
        let n = grid.dim();
        if flux.dim() != n {
            return Err(Error::param(format!(
                "flux has {} components on a {n}-dimensional grid",
                flux.dim()
            )));
        }
        if convection.dim() != n {
            return Err(Error::param(format!(
                "convection has {} components on a {n}-dimensional grid",
                convection.dim()
            )));
        }
        let p: Vec<f64> = (0..n).map(|i| flux.exponent(i)).collect();
        if let Some(&bad) = p.iter().find(|&&q| !(q > 1.0)) {
            return Err(Error::param(format!("solver requires p⁻ > 1, got p⁻ = {bad}")));
        }
        let exponents = AnisotropicExponents::new(&p)?;
        if !(flux.coercivity() > 0.0 && flux.growth() > 0.0) {
            return Err(Error::param("flux must declare λ > 0 and γ > 0"));
        }
        if !beta.domain().is_real_line() {
            return Err(Error::InvalidGraph(
                "solver requires a graph defined on all of ℝ".into(),
            ));
        }
        if !beta.contains_origin() {
            return Err(Error::InvalidGraph("0 ∈ β(0) is violated".into()));
        }
        Ok(ProblemSpec {
            grid,
            exponents,
            beta,
            flux,
            convection,
            source,
            source_class,
        })
    }

    /// Same problem with another source on the same grid.
    pub fn with_source(&self, source: GridFunction) -> Result<Self> {
        if source.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut p = self.clone();
        p.source = source;
        Ok(p)
    }

    pub fn with_source_class(&self, class: DataClass) -> Self {
        let mut p = self.clone();
        p.source_class = class;
        p
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn exponents(&self) -> &AnisotropicExponents {
        &self.exponents
    }

    pub fn beta(&self) -> &MonotoneGraph {
        &self.beta
    }

    pub fn flux(&self) -> &dyn FluxModel {
        &*self.flux
    }

    pub fn flux_arc(&self) -> Arc<dyn FluxModel> {
        self.flux.clone()
    }

    pub fn convection(&self) -> &ConvectionModel {
        &self.convection
    }

    pub fn source(&self) -> &GridFunction {
        &self.source
    }

    pub fn source_class(&self) -> DataClass {
        self.source_class
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Smallest step length tried by the backtracking line search.
    pub damping_min: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol_residual: 1e-8,
            max_iter: 100,
            damping_min: 1e-8,
        }
    }
}

/// Smoothing parameter `δ` of the flux as a function of the schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaCoupling {
    /// `δ = ε` when `p⁻ < 2`, otherwise `δ = 0`.
    Auto,
    Fixed(f64),
    /// One value per entry of the ε schedule.
    Schedule(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon_schedule: Vec<f64>,
    pub newton: NewtonConfig,
    pub picard_fallback: bool,
    pub picard_max_iter: usize,
    pub delta: DeltaCoupling,
    /// Tolerance on the last `L¹` distance between consecutive iterates.
    pub cauchy_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon_schedule: vec![1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001],
            newton: NewtonConfig::default(),
            picard_fallback: true,
            picard_max_iter: 500,
            delta: DeltaCoupling::Auto,
            cauchy_tol: 1e-5,
        }
    }
}

impl SolverConfig {
    /// Default configuration with a one-point schedule.
    pub fn single(eps: f64) -> Self {
        SolverConfig {
            epsilon_schedule: vec![eps],
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.newton.tol_residual = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.epsilon_schedule;
        if s.is_empty() {
            return Err(Error::param("epsilon schedule is empty"));
        }
        if let Some(bad) = s.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::param(format!("epsilon {bad} outside (0, 1]")));
        }
        if s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("epsilon schedule must be strictly decreasing"));
        }
        if !(self.newton.tol_residual > 0.0) {
            return Err(Error::param("tol_residual must be positive"));
        }
        if self.newton.max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        if !(self.newton.damping_min > 0.0 && self.newton.damping_min <= 1.0) {
            return Err(Error::param("damping_min must lie in (0, 1]"));
        }
        if !(self.cauchy_tol > 0.0) {
            return Err(Error::param("cauchy_tol must be positive"));
        }
        match &self.delta {
            DeltaCoupling::Auto => {}
            DeltaCoupling::Fixed(d) => {
                if !(*d >= 0.0 && d.is_finite()) {
                    return Err(Error::param(format!(
                        "delta_reg {d} must be a finite nonnegative number"
                    )));
                }
            }
            DeltaCoupling::Schedule(ds) => {
                if ds.len() != s.len() {
                    return Err(Error::param(format!(
                        "delta schedule has {} entries for {} epsilons",
                        ds.len(),
                        s.len()
                    )));
                }
                if ds.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
                    return Err(Error::param("delta schedule entries must be finite and nonnegative"));
                }
            }
        }
        Ok(())
    }

    /// Smoothing used at schedule position `k`. Fails when the flux needs
    /// smoothing (`p⁻ < 2`) and `δ = 0` would be used.
    pub fn delta_at(&self, k: usize, exponents: &AnisotropicExponents) -> Result<f64> {
        let d = match &self.delta {
            DeltaCoupling::Schedule(ds) => ds[k],
            _ => return self.delta_for(self.epsilon_schedule[k], exponents),
        };
        check_delta(d, exponents)
    }

    /// Smoothing paired with an arbitrary `ε`; a delta schedule is looked up
    /// by the position of `ε` in the ε schedule.
    pub fn delta_for(&self, eps: f64, exponents: &AnisotropicExponents) -> Result<f64> {
        let d = match &self.delta {
            DeltaCoupling::Auto => {
                if exponents.p_minus() < 2.0 {
                    eps
                } else {
                    0.0
                }
            }
            DeltaCoupling::Fixed(d) => *d,
            DeltaCoupling::Schedule(ds) => {
                let k = self
                    .epsilon_schedule
                    .iter()
                    .position(|&e| e == eps)
                    .ok_or_else(|| Error::param(format!("epsilon {eps} is not in the schedule")))?;
                ds[k]
            }
        };
        check_delta(d, exponents)
    }
}

fn check_delta(d: f64, exponents: &AnisotropicExponents) -> Result<f64> {
    if exponents.p_minus() < 2.0 && d == 0.0 {
        return Err(Error::param("delta_reg must be positive when p⁻ < 2"));
    }
    Ok(d)
}
