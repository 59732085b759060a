use alloc::boxed::Box;
use alloc::vec::Vec;

use super::problem::{ProblemSpec, SolverConfig};
use super::residual::Discretization;
use super::{EpsilonReport, Method, Timer};
use crate::error::{Error, IterationFailure, Result};
use crate::grid::GridFunction;

/// Armijo constant for the sufficient decrease `‖R(u + t d)‖ ≤ (1 − c t) ‖R(u)‖`.
const ARMIJO: f64 = 1e-4;

struct State {
    u: Vec<f64>,
    r: Vec<f64>,
    norm: f64,
    history: Vec<f64>,
    damping: Vec<f64>,
    best: Vec<f64>,
    best_norm: f64,
}

impl State {
    fn accept(&mut self, u: Vec<f64>, r: Vec<f64>, norm: f64, t: f64) {
        self.u = u;
        self.r = r;
        self.norm = norm;
        self.history.push(norm);
        self.damping.push(t);
        if norm < self.best_norm {
            self.best_norm = norm;
            self.best.clone_from(&self.u);
        }
    }
}

enum Outcome {
    Converged,
    Stalled,
}

/// Backtracking along `direction` (interior values). Returns false when no
/// step length above `damping_min` gives sufficient decrease.
fn line_search(d: &Discretization, st: &mut State, direction: &[f64], damping_min: f64) -> Result<bool> {
    let mut t = 1.0;
    while t >= damping_min {
        let mut trial = st.u.clone();
        for (k, &n) in d.interior().iter().enumerate() {
            trial[n] += t * direction[k];
        }
        if trial.iter().all(|v| v.is_finite()) {
            let r = d.residual(&trial)?;
            let norm = d.norm(&r);
            if norm <= (1.0 - ARMIJO * t) * st.norm {
                st.accept(trial, r, norm, t);
                return Ok(true);
            }
        }
        t *= 0.5;
    }
    Ok(false)
}

fn newton(d: &Discretization, st: &mut State, cfg: &SolverConfig, iters: &mut usize) -> Result<Outcome> {
    let tol = cfg.newton.tol_residual;
    while *iters < cfg.newton.max_iter {
        if st.norm <= tol {
            return Ok(Outcome::Converged);
        }
        let mut jac = match d.jacobian(&st.u) {
            Ok(j) => j,
            Err(Error::DerivativeOverflow { .. }) => return Ok(Outcome::Stalled),
            Err(e) => return Err(e),
        };
        let mut step: Vec<f64> = d.gather(&st.r).iter().map(|v| -v).collect();
        match jac.solve_in_place(&mut step) {
            Ok(()) => {}
            Err(Error::Singular { .. }) => return Ok(Outcome::Stalled),
            Err(e) => return Err(e),
        }
        *iters += 1;
        if !line_search(d, st, &step, cfg.newton.damping_min)? {
            return Ok(Outcome::Stalled);
        }
    }
    Ok(if st.norm <= tol {
        Outcome::Converged
    } else {
        Outcome::Stalled
    })
}

fn picard(d: &Discretization, st: &mut State, cfg: &SolverConfig, iters: &mut usize) -> Result<Outcome> {
    let tol = cfg.newton.tol_residual;
    let limit = *iters + cfg.picard_max_iter;
    while *iters < limit {
        if st.norm <= tol {
            return Ok(Outcome::Converged);
        }
        let (mut m, mut v) = d.picard_system(&st.u)?;
        m.solve_in_place(&mut v)?;
        let dir: Vec<f64> = v.iter().zip(d.interior()).map(|(vk, &n)| vk - st.u[n]).collect();
        *iters += 1;
        if !best_of_steps(d, st, &dir)? && !line_search(d, st, &dir, cfg.newton.damping_min)? {
            return Ok(Outcome::Stalled);
        }
    }
    Ok(if st.norm <= tol {
        Outcome::Converged
    } else {
        Outcome::Stalled
    })
}

/// Frozen-coefficient steps can oscillate for `p > 2`; pick the best of a
/// few relaxations instead of the first acceptable one.
fn best_of_steps(d: &Discretization, st: &mut State, direction: &[f64]) -> Result<bool> {
    let mut best: Option<(Vec<f64>, Vec<f64>, f64, f64)> = None;
    for t in [1.0, 0.75, 0.5, 0.25] {
        let mut trial = st.u.clone();
        for (k, &n) in d.interior().iter().enumerate() {
            trial[n] += t * direction[k];
        }
        if !trial.iter().all(|v| v.is_finite()) {
            continue;
        }
        let r = d.residual(&trial)?;
        let norm = d.norm(&r);
        if best.as_ref().is_none_or(|b| norm < b.2) {
            best = Some((trial, r, norm, t));
        }
    }
    match best {
        Some((u, r, norm, t)) if norm < (1.0 - ARMIJO * t) * st.norm => {
            st.accept(u, r, norm, t);
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Solves the regularized equation at `(ε, δ)` from the initial guess `u0`.
///
/// Semismooth Newton with Armijo backtracking on the weighted residual norm;
/// if Newton stalls and `cfg.picard_fallback` is set, frozen-coefficient
/// (Kačanov) iterations continue from the best iterate. On failure the error
/// carries the best iterate and the residual history.
pub fn solve_regularized(
    prob: &ProblemSpec,
    eps: f64,
    delta: f64,
    cfg: &SolverConfig,
    u0: &GridFunction,
) -> Result<(GridFunction, EpsilonReport)> {
    if u0.grid() != prob.grid() {
        return Err(Error::GridMismatch);
    }
    if !u0.is_dirichlet() {
        return Err(Error::NotDirichlet);
    }
    let timer = Timer::start();
    let d = Discretization::new(prob, eps, delta)?;
    let u = u0.values().to_vec();
    let r = d.residual(&u)?;
    let norm = d.norm(&r);
    let mut st = State {
        best: u.clone(),
        u,
        r,
        norm,
        history: alloc::vec![norm],
        damping: Vec::new(),
        best_norm: norm,
    };
    let mut iters = 0;
    let mut method = Method::Newton;
    let mut fallback_used = false;
    let mut outcome = newton(&d, &mut st, cfg, &mut iters)?;
    if matches!(outcome, Outcome::Stalled) && cfg.picard_fallback {
        fallback_used = true;
        method = Method::Picard;
        if st.best_norm < st.norm {
            st.u = st.best.clone();
            st.r = d.residual(&st.u)?;
            st.norm = st.best_norm;
        }
        outcome = picard(&d, &mut st, cfg, &mut iters)?;
        if matches!(outcome, Outcome::Converged) {
            // polish with Newton from the Picard iterate
            method = Method::Newton;
            let extra = newton(&d, &mut st, cfg, &mut iters)?;
            if matches!(extra, Outcome::Stalled) {
                method = Method::Picard;
            }
        }
    }
    match outcome {
        Outcome::Converged => {
            let report = EpsilonReport {
                epsilon: eps,
                delta,
                method,
                iterations: iters,
                residual: st.norm,
                residual_history: st.history,
                damping_history: st.damping,
                wall_time: timer.elapsed(),
                fallback_used,
            };
            Ok((GridFunction::new(prob.grid().clone(), st.u)?, report))
        }
        Outcome::Stalled => Err(Error::IterationFailure(Box::new(IterationFailure {
            epsilon: eps,
            best: GridFunction::new(prob.grid().clone(), st.best)?,
            best_residual: st.best_norm,
            residual_history: st.history,
        }))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{ConvectionModel, PowerFlux};
    use crate::graph::MonotoneGraph;
    use crate::grid::Grid;
    use crate::solver::{assemble_residual, residual_norm, DataClass};
    use alloc::sync::Arc;

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
    fn zero_data_gives_zero() {
        let g = Grid::unit(&[10, 10]).unwrap();
        let p = prob(
            &g,
            MonotoneGraph::stefan(1.0).unwrap(),
            &[1.5, 3.0],
            GridFunction::zeros(&g),
        );
        let (u, rep) = solve_regularized(&p, 0.1, 0.1, &SolverConfig::default(), &GridFunction::zeros(&g)).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn poisson_converges_and_report_is_consistent() {
        let g = Grid::unit(&[32]).unwrap();
        let p = prob(&g, MonotoneGraph::zero(), &[2.0], GridFunction::constant(&g, 1.0));
        let cfg = SolverConfig::default().with_tol(1e-11);
        let (u, rep) = solve_regularized(&p, 1e-10, 0.0, &cfg, &GridFunction::zeros(&g)).unwrap();
        let err = u.values().iter().enumerate().fold(0.0f64, |m, (i, v)| {
            let x = g.coordinates(i)[0];
            m.max((v - x * (1.0 - x) / 2.0).abs())
        });
        assert!(err < 1e-8, "{err}");
        let again = residual_norm(&assemble_residual(&p, 1e-10, 0.0, &u).unwrap());
        assert!((again - rep.residual).abs() <= 1e-10);
        assert!(!rep.fallback_used);
    }

    #[test]
    fn nonlinear_problem_converges() {
        let g = Grid::unit(&[16, 12]).unwrap();
        let f = GridFunction::from_fn(&g, |x| 20.0 * (x[0] - 0.4) * (x[1] + 0.2));
        let p = prob(&g, MonotoneGraph::stefan(2.0).unwrap(), &[1.5, 4.0], f);
        for &eps in &[1.0, 0.1, 0.01] {
            let (_, rep) = solve_regularized(&p, eps, eps, &SolverConfig::default(), &GridFunction::zeros(&g)).unwrap();
            assert!(rep.residual <= 1e-8);
        }
    }

    #[test]
    fn picard_alone_converges() {
        let g = Grid::unit(&[12]).unwrap();
        let p = prob(&g, MonotoneGraph::identity(), &[3.0], GridFunction::constant(&g, 3.0));
        let mut cfg = SolverConfig::default();
        cfg.newton.max_iter = 1;
        let u0 = GridFunction::zeros(&g);
        let (u, rep) = solve_regularized(&p, 0.5, 0.0, &cfg, &u0).unwrap();
        assert!(rep.fallback_used);
        let (v, _) = solve_regularized(&p, 0.5, 0.0, &SolverConfig::default(), &u0).unwrap();
        assert!(u.max_abs_diff(&v).unwrap() < 1e-7);
    }

    #[test]
    fn failure_carries_best_iterate() {
        let g = Grid::unit(&[12]).unwrap();
        let p = prob(&g, MonotoneGraph::identity(), &[3.0], GridFunction::constant(&g, 3.0));
        let mut cfg = SolverConfig::default();
        cfg.newton.max_iter = 1;
        cfg.picard_fallback = false;
        match solve_regularized(&p, 0.5, 0.0, &cfg, &GridFunction::zeros(&g)) {
            Err(Error::IterationFailure(f)) => {
                assert_eq!(f.epsilon, 0.5);
                assert!(f.best_residual < f.residual_history[0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
