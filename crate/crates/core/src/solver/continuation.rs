use alloc::format;
use alloc::vec::Vec;

use super::newton::solve_regularized;
use super::problem::{DataClass, ProblemSpec, SolverConfig};
use super::SolveReport;
use crate::error::{Error, Result};
use crate::grid::{lp_norm, GridFunction};

/// Output of an ε-continuation run.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    /// `u_ε` at the smallest ε.
    pub u: GridFunction,
    /// `b_ε = β_ε(T_{1/ε} u_ε)` at the smallest ε.
    pub b: GridFunction,
    /// `J_ε(T_{1/ε} u_ε)`: the graph point paired with `b`, so that
    /// `b ∈ β(u_graph)` holds exactly.
    pub u_graph: GridFunction,
    /// `(ε, u_ε, b_ε)` for every schedule entry.
    pub iterates: Vec<(f64, GridFunction, GridFunction)>,
    pub report: SolveReport,
}

fn l1_distance(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    lp_norm(&a.zip_map(b, |x, y| x - y)?, 1.0)
}

fn run_schedule(prob: &ProblemSpec, cfg: &SolverConfig, u0: &GridFunction) -> Result<ContinuationResult> {
    cfg.validate()?;
    let beta = prob.beta();
    let mut u = u0.clone();
    let mut report = SolveReport::default();
    let mut iterates: Vec<(f64, GridFunction, GridFunction)> = Vec::with_capacity(cfg.epsilon_schedule.len());
    let mut u_graph = u0.clone();
    for (k, &eps) in cfg.epsilon_schedule.iter().enumerate() {
        let delta = cfg.delta_at(k, prob.exponents())?;
        let (next, step) = solve_regularized(prob, eps, delta, cfg, &u)?;
        let tk = |r: f64| r.max(-1.0 / eps).min(1.0 / eps);
        let mut b = Vec::with_capacity(next.values().len());
        let mut s = Vec::with_capacity(next.values().len());
        for &v in next.values() {
            b.push(beta.yosida(tk(v), eps)?);
            s.push(beta.resolvent(tk(v), eps)?);
        }
        let b = GridFunction::new(prob.grid().clone(), b)?;
        u_graph = GridFunction::new(prob.grid().clone(), s)?;
        if let Some((_, up, bp)) = iterates.last() {
            report.cauchy_u.push(l1_distance(up, &next)?);
            report.cauchy_b.push(l1_distance(bp, &b)?);
        }
        report.steps.push(step);
        iterates.push((eps, next.clone(), b));
        u = next;
    }
    report.cauchy_converged = report.cauchy_u.last().is_some_and(|&d| d < cfg.cauchy_tol);
    let (_, u, b) = iterates.last().cloned().expect("schedule is nonempty");
    Ok(ContinuationResult {
        u,
        b,
        u_graph,
        iterates,
        report,
    })
}

/// Runs [`solve_regularized`] along the ε schedule from `u = 0`, warm
/// starting each solve from the previous one.
pub fn continuation_limit(prob: &ProblemSpec, cfg: &SolverConfig) -> Result<ContinuationResult> {
    continuation_limit_from(prob, cfg, &GridFunction::zeros(prob.grid()))
}

/// [`continuation_limit`] from a given initial guess.
pub fn continuation_limit_from(
    prob: &ProblemSpec,
    cfg: &SolverConfig,
    u0: &GridFunction,
) -> Result<ContinuationResult> {
    if prob.source_class() != DataClass::Bounded {
        return Err(Error::param(
            "continuation needs bounded data; use the truncation driver for integrable data",
        ));
    }
    run_schedule(prob, cfg, u0)
}

/// `max(min(f, m), −n)` nodewise.
pub fn truncate_data(f: &GridFunction, m: f64, n: f64) -> GridFunction {
    f.map(|v| v.min(m).max(-n))
}

/// One `(m, n)` solve of the truncation driver.
#[derive(Debug, Clone)]
pub struct L1Run {
    pub m: f64,
    pub n: f64,
    pub u: GridFunction,
    pub b: GridFunction,
    pub report: SolveReport,
}

/// Nodewise ordering between two runs: `margin = min(upper − lower)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCheck {
    pub field: &'static str,
    /// `(m, n)` of the run expected to be smaller.
    pub lower: (f64, f64),
    /// `(m, n)` of the run expected to be larger.
    pub upper: (f64, f64),
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct L1Report {
    /// Runs in `m`-major order over `m_list × n_list`.
    pub runs: Vec<L1Run>,
    pub orderings: Vec<OrderingCheck>,
    /// `(m, n, ‖f‖₁ − ‖b_{m,n}‖₁)`.
    pub l1_margins: Vec<(f64, f64, f64)>,
    /// `‖b_k − b_{k+1}‖₁` along the diagonal `(m_k, n_k)`.
    pub diagonal_cauchy_b: Vec<f64>,
    /// Result of the largest `(m, n)`.
    pub u: GridFunction,
    pub b: GridFunction,
    pub tol: f64,
}

impl L1Report {
    pub fn orderings_pass(&self) -> bool {
        self.orderings.iter().all(|o| o.pass)
    }

    pub fn l1_bounds_pass(&self) -> bool {
        self.l1_margins.iter().all(|&(_, _, m)| m >= -self.tol)
    }

    pub fn run(&self, m: f64, n: f64) -> Option<&L1Run> {
        self.runs.iter().find(|r| r.m == m && r.n == n)
    }
}

fn ordering(field: &'static str, lo: &L1Run, hi: &L1Run, tol: f64) -> Result<OrderingCheck> {
    let (a, b) = if field == "u" { (&lo.u, &hi.u) } else { (&lo.b, &hi.b) };
    let margin = b.zip_map(a, |x, y| x - y)?.min();
    Ok(OrderingCheck {
        field,
        lower: (lo.m, lo.n),
        upper: (hi.m, hi.n),
        margin,
        pass: margin >= -tol,
    })
}

fn check_levels(name: &str, list: &[f64]) -> Result<()> {
    if list.is_empty() {
        return Err(Error::param(format!("{name} is empty")));
    }
    if list.iter().any(|&v| !(v >= 1.0 && v.is_finite())) {
        return Err(Error::param(format!("{name} entries must be finite and >= 1")));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// Two-sided truncation driver: solves with `f_{m,n}` for every pair in
/// `m_list × n_list`, then checks that `u_{m,n}` and `b_{m,n}` are
/// nondecreasing in `m`, nonincreasing in `n`, and that
/// `‖b_{m,n}‖₁ ≤ ‖f‖₁`. Violations are reported, not raised.
pub fn solve_l1(prob: &ProblemSpec, cfg: &SolverConfig, m_list: &[f64], n_list: &[f64], tol: f64) -> Result<L1Report> {
    check_levels("m_list", m_list)?;
    check_levels("n_list", n_list)?;
    let f = prob.source();
    let f_norm = lp_norm(f, 1.0)?;
    let mut runs = Vec::with_capacity(m_list.len() * n_list.len());
    let mut l1_margins = Vec::new();
    for &m in m_list {
        for &n in n_list {
            let sub = prob
                .with_source(truncate_data(f, m, n))?
                .with_source_class(DataClass::Bounded);
            let res = run_schedule(&sub, cfg, &GridFunction::zeros(prob.grid()))?;
            l1_margins.push((m, n, f_norm - lp_norm(&res.b, 1.0)?));
            runs.push(L1Run {
                m,
                n,
                u: res.u,
                b: res.b,
                report: res.report,
            });
        }
    }
    let nn = n_list.len();
    let mut orderings = Vec::new();
    for (i, _) in m_list.iter().enumerate() {
        for (j, _) in n_list.iter().enumerate() {
            let here = &runs[i * nn + j];
            for field in ["u", "b"] {
                if i + 1 < m_list.len() {
                    orderings.push(ordering(field, here, &runs[(i + 1) * nn + j], tol)?);
                }
                if j + 1 < nn {
                    orderings.push(ordering(field, &runs[i * nn + j + 1], here, tol)?);
                }
            }
        }
    }
    let diag = m_list.len().min(nn);
    let mut diagonal_cauchy_b = Vec::new();
    for k in 1..diag {
        diagonal_cauchy_b.push(l1_distance(&runs[(k - 1) * nn + k - 1].b, &runs[k * nn + k].b)?);
    }
    let last = runs.last().expect("lists are nonempty");
    Ok(L1Report {
        u: last.u.clone(),
        b: last.b.clone(),
        runs,
        orderings,
        l1_margins,
        diagonal_cauchy_b,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{ConvectionModel, PowerFlux};
    use crate::graph::MonotoneGraph;
    use crate::grid::Grid;
    use alloc::sync::Arc;
    use alloc::vec;

    fn prob(g: &Grid, beta: MonotoneGraph, p: &[f64], f: GridFunction) -> ProblemSpec {
        ProblemSpec::new(
            beta,
            Arc::new(PowerFlux::new(p).unwrap()),
            ConvectionModel::Zero { dim: g.dim() },
            f,
            DataClass::Bounded,
        )
        .unwrap()
    }

    #[test]
    fn truncation_examples() {
        let g = Grid::unit(&[4]).unwrap();
        assert_eq!(truncate_data(&GridFunction::constant(&g, 5.0), 3.0, 1.0).max(), 3.0);
        assert_eq!(truncate_data(&GridFunction::constant(&g, -5.0), 3.0, 1.0).min(), -1.0);
        let f = GridFunction::from_fn(&g, |x| x[0] - 0.5);
        assert_eq!(truncate_data(&f, 1.0, 1.0), f);
    }

    #[test]
    fn zero_data_limit_is_zero() {
        let g = Grid::unit(&[8]).unwrap();
        let p = prob(&g, MonotoneGraph::stefan(1.0).unwrap(), &[2.0], GridFunction::zeros(&g));
        let r = continuation_limit(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.u.max_abs(), 0.0);
        assert_eq!(r.b.max_abs(), 0.0);
    }

    #[test]
    fn linear_problem_cauchy_decays() {
        let g = Grid::unit(&[32]).unwrap();
        let f = GridFunction::from_fn(&g, |x| libm::sin(3.0 * x[0]) + 1.0);
        let p = prob(&g, MonotoneGraph::identity(), &[2.0], f);
        let r = continuation_limit(&p, &SolverConfig::default()).unwrap();
        assert!(
            r.report.cauchy_u.windows(2).all(|w| w[1] < w[0]),
            "{:?}",
            r.report.cauchy_u
        );
        assert!(r.report.all_solves_converged(1e-8));
    }

    #[test]
    fn stefan_limit_lies_on_graph() {
        let g = Grid::unit(&[32]).unwrap();
        let p = prob(
            &g,
            MonotoneGraph::stefan(1.0).unwrap(),
            &[2.0],
            GridFunction::constant(&g, 2.0),
        );
        let r = continuation_limit(&p, &SolverConfig::default()).unwrap();
        for (s, b) in r.u_graph.values().iter().zip(r.b.values()) {
            assert!(p.beta().distance_to_graph(*s, *b) <= 1e-6);
        }
    }

    #[test]
    fn integrable_class_needs_driver() {
        let g = Grid::unit(&[8]).unwrap();
        let p = prob(&g, MonotoneGraph::identity(), &[2.0], GridFunction::zeros(&g))
            .with_source_class(DataClass::Integrable);
        assert!(continuation_limit(&p, &SolverConfig::default()).is_err());
    }

    #[test]
    fn l1_driver_with_bounded_data_matches_continuation() {
        let g = Grid::unit(&[16]).unwrap();
        let f = GridFunction::from_fn(&g, |x| x[0] - 0.3);
        let p = prob(&g, MonotoneGraph::identity(), &[2.0], f);
        let cfg = SolverConfig {
            epsilon_schedule: vec![1.0, 0.1, 0.01],
            ..SolverConfig::default()
        };
        let direct = continuation_limit(&p, &cfg).unwrap();
        let rep = solve_l1(&p, &cfg, &[4.0], &[4.0], 1e-6).unwrap();
        assert_eq!(rep.runs.len(), 1);
        assert!(rep.u.max_abs_diff(&direct.u).unwrap() < 1e-12);
        assert!(rep.l1_bounds_pass());
    }
}
