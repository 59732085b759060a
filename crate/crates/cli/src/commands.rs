//! The four subcommands. Each writes its artifacts into the output
//! directory and returns a one-line summary, or the error that decides the
//! exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stefan_core::anchors;
use stefan_core::diagnostics::{
    certify_renormalized, comparison_certificate, estimate_certificates, kato_certificate, levelset_certificate,
    Certificate, CertificateReport, CertifyOptions,
};
use stefan_core::embeddings::measure;
use stefan_core::flux::{check_assumptions, AssumptionSample};
use stefan_core::grid::{lp_norm, reconstruction_error};
use stefan_core::solver::{
    continuation_limit, continuation_limit_from, solve_l1, truncate_data, EpsilonReport, SolveReport,
};
use stefan_core::{AnisotropicExponents, DataClass, Error, GridFunction, ProblemSpec};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::expr::SourceExpr;
use crate::io::{num, write_certificates, write_field, write_table};

/// Command-line overrides of config values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Certificate tolerance.
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.diagnostics.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.diagnostics.tol = t;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Eps,
    Mn,
    Grid,
}

fn out_dir(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Write {
        path: dir.clone(),
        message: e.to_string(),
    })?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn cfg_err(e: Error) -> CliError {
    CliError::config(e)
}

/// Solver errors exit with 3; on an iteration failure the best iterate is
/// kept as `best_iterate.csv`.
fn solver_failure(out: &Path, e: Error) -> CliError {
    match e {
        Error::IterationFailure(ref f) => {
            let _ = write_field(&out.join("best_iterate.csv"), &f.best);
            CliError::Solver(e)
        }
        Error::InvalidParameter(_) | Error::InvalidGraph(_) | Error::InvalidGrid(_) => CliError::config(e),
        other => CliError::Solver(other),
    }
}

fn certificate_outcome(rep: &CertificateReport, what: &str) -> CliResult<String> {
    let fails: Vec<String> = rep
        .failures()
        .map(|c| format!("{} [{}] margin {:.3e}", c.name, c.anchor, c.margin))
        .collect();
    if fails.is_empty() {
        Ok(format!("{what}: {} certificates pass", rep.entries.len()))
    } else {
        Err(CliError::Certificate(fails.join("; ")))
    }
}

fn describe_problem(text: &mut String, cfg: &ExperimentConfig, prob: &ProblemSpec) {
    let g = prob.grid();
    let e = prob.exponents();
    let _ = writeln!(text, "problem");
    let _ = writeln!(text, "  grid cells        {:?}", g.cells());
    let _ = writeln!(
        text,
        "  bounds            {:?}",
        (0..g.dim()).map(|i| g.bounds(i)).collect::<Vec<_>>()
    );
    let _ = writeln!(text, "  p                 {:?}", e.p());
    let _ = writeln!(
        text,
        "  p-, p+, p_bar     {}, {}, {}",
        e.p_minus(),
        e.p_plus(),
        e.p_bar()
    );
    match e.p_bar_star() {
        Some(s) => {
            let _ = writeln!(text, "  p_bar*, p_inf     {s}, {}", e.p_infinity());
        }
        None => {
            let _ = writeln!(text, "  p_bar >= N: p_bar* undefined, p_inf = {}", e.p_infinity());
        }
    }
    let _ = writeln!(text, "  graph             {:?}", cfg.problem.graph);
    let _ = writeln!(text, "  flux              {}", prob.flux().name());
    let _ = writeln!(text, "  convection        {}", cfg.problem.convection);
    let _ = writeln!(
        text,
        "  source            {}",
        cfg.problem
            .source
            .clone()
            .unwrap_or_else(|| format!("{:?}", cfg.problem.source_csv))
    );
    let _ = writeln!(text, "  data class        {:?}", prob.source_class());
    let _ = writeln!(text);
}

fn describe_steps(text: &mut String, label: &str, rep: &SolveReport) {
    let _ = writeln!(text, "{label}");
    let _ = writeln!(
        text,
        "  {:>10} {:>10} {:>8} {:>6} {:>12} {:>9} {:>10}",
        "eps", "delta", "method", "iters", "residual", "fallback", "seconds"
    );
    for s in &rep.steps {
        let _ = writeln!(
            text,
            "  {:>10} {:>10} {:>8} {:>6} {:>12.4e} {:>9} {:>10}",
            s.epsilon,
            s.delta,
            format!("{:?}", s.method),
            s.iterations,
            s.residual,
            s.fallback_used,
            s.wall_time.map(|t| format!("{t:.3}")).unwrap_or_default()
        );
    }
    if !rep.cauchy_u.is_empty() {
        let fmt = |v: &[f64]| v.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(text, "  cauchy |u_k - u_k+1|_1  {}", fmt(&rep.cauchy_u));
        let _ = writeln!(text, "  cauchy |b_k - b_k+1|_1  {}", fmt(&rep.cauchy_b));
        let _ = writeln!(text, "  cauchy converged        {}", rep.cauchy_converged);
    }
    let _ = writeln!(text);
}

fn describe_certificates(text: &mut String, rep: &CertificateReport) {
    let _ = writeln!(text, "certificates");
    for c in &rep.entries {
        let _ = writeln!(
            text,
            "  {:<4} {:<36} {:<32} measured {:>12.5e}  bound {:>12.5e}  margin {:>12.5e}{}",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.anchor,
            c.measured,
            c.bound,
            c.margin,
            if c.detail.is_empty() {
                String::new()
            } else {
                format!("  ({})", c.detail)
            }
        );
    }
    for (n, v) in &rep.constants {
        let _ = writeln!(text, "  constant {n} = {v:.6e}");
    }
    let _ = writeln!(text);
}

fn iteration_rows(rows: &mut Vec<Vec<String>>, tag: &str, steps: &[EpsilonReport]) {
    for s in steps {
        for (k, r) in s.residual_history.iter().enumerate() {
            rows.push(vec![
                tag.to_string(),
                num(s.epsilon),
                num(s.delta),
                k.to_string(),
                num(*r),
                if k == 0 {
                    String::new()
                } else {
                    s.damping_history.get(k - 1).map(|v| num(*v)).unwrap_or_default()
                },
                format!("{:?}", s.method),
            ]);
        }
    }
}

const ITERATION_HEADER: [&str; 7] = ["run", "eps", "delta", "iteration", "residual", "damping", "method"];

/// Seeded Dirichlet field with values in `[-1, 1]` at interior nodes.
fn random_dirichlet(prob: &ProblemSpec, rng: &mut ChaCha8Rng) -> GridFunction {
    let g = prob.grid();
    let mut u = GridFunction::zeros(g);
    for n in g.interior_nodes() {
        u.values_mut()[n] = rng.random_range(-1.0..=1.0);
    }
    u
}

pub fn solve(cfg: &ExperimentConfig) -> CliResult<String> {
    let prob = cfg.problem()?;
    let scfg = cfg.solver_config()?;
    let out = out_dir(cfg)?;
    let tol = cfg.diagnostics.tol;
    let exps = prob.exponents().clone();
    let k_last = scfg.epsilon_schedule.len() - 1;
    let eps = scfg.epsilon_schedule[k_last];
    let delta = scfg.delta_at(k_last, &exps).map_err(cfg_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.diagnostics.seed);

    let mut text = String::new();
    describe_problem(&mut text, cfg, &prob);
    let mut certs = CertificateReport::new();
    let mut iter_rows = Vec::new();

    // The problem whose discrete solution `u` is: the data itself, or its
    // largest truncation for integrable data.
    let (effective, u, b) = match prob.source_class() {
        DataClass::Bounded => {
            let run = continuation_limit(&prob, &scfg).map_err(|e| solver_failure(&out, e))?;
            describe_steps(&mut text, "continuation", &run.report);
            iteration_rows(&mut iter_rows, "limit", &run.report.steps);
            if cfg.wants("estimates") {
                certs.extend(estimate_certificates(&prob, &run, &scfg, &cfg.diagnostics.levels, tol).map_err(cfg_err)?);
            }
            (prob.clone(), run.u, run.b)
        }
        DataClass::Integrable => {
            let (ml, nl) = (&cfg.solver.m_list, &cfg.solver.n_list);
            let l1 = solve_l1(&prob, &scfg, ml, nl, tol).map_err(|e| solver_failure(&out, e))?;
            for r in &l1.runs {
                let tag = format!("m={} n={}", r.m, r.n);
                describe_steps(&mut text, &format!("truncation run {tag}"), &r.report);
                iteration_rows(&mut iter_rows, &tag, &r.report.steps);
            }
            for o in &l1.orderings {
                let anchor = if o.lower.1 == o.upper.1 {
                    anchors::ORDER_M
                } else {
                    anchors::ORDER_N
                };
                certs.push(Certificate::upper(
                    format!("{} ordering {:?} <= {:?}", o.field, o.lower, o.upper),
                    anchor,
                    -o.margin,
                    0.0,
                    tol,
                ));
            }
            let f1 = lp_norm(prob.source(), 1.0).map_err(cfg_err)?;
            for &(m, n, margin) in &l1.l1_margins {
                certs.push(Certificate::upper(
                    format!("L1 bound of b, m={m} n={n}"),
                    anchors::L1_BOUND,
                    f1 - margin,
                    f1,
                    tol,
                ));
            }
            let (m, n) = (ml[ml.len() - 1], nl[nl.len() - 1]);
            let _ = writeln!(
                text,
                "certificates below use the truncated data f_(m,n), m = {m}, n = {n}\n"
            );
            let eff = prob
                .with_source(truncate_data(prob.source(), m, n))
                .map_err(cfg_err)?
                .with_source_class(DataClass::Bounded);
            (eff, l1.u, l1.b)
        }
    };

    if cfg.wants("renormalized") {
        let opts = CertifyOptions {
            eps,
            delta,
            bands: cfg.diagnostics.bands.clone(),
            tol,
        };
        certs.extend(certify_renormalized(&u, &b, &effective, &opts).map_err(cfg_err)?);
    }
    if cfg.wants("levelset") {
        let bounded = prob.source_class() == DataClass::Bounded;
        certs.extend(levelset_certificate(&u, &exps, &cfg.diagnostics.levels, bounded, tol).map_err(cfg_err)?);
    }
    if cfg.wants("comparison") {
        let f = effective.source();
        let shift = cfg.diagnostics.comparison_shift;
        let f_tilde = f.map(|v| v + shift);
        let c =
            comparison_certificate(&effective, f, &f_tilde, eps, &scfg, tol).map_err(|e| solver_failure(&out, e))?;
        certs.extend(c.report);
    }
    if cfg.wants("uniqueness") {
        let u0 = random_dirichlet(&effective, &mut rng);
        let other = continuation_limit_from(&effective, &scfg, &u0).map_err(|e| solver_failure(&out, e))?;
        describe_steps(&mut text, "second run from a random start", &other.report);
        iteration_rows(&mut iter_rows, "random start", &other.report.steps);
        let f = effective.source();
        let strict = effective.beta().is_strictly_monotone();
        certs.extend(kato_certificate(&u, &b, &other.u, &other.b, f, f, strict, tol).map_err(cfg_err)?);
    }

    write_field(&out.join("solution.csv"), &u)?;
    write_field(&out.join("b_field.csv"), &b)?;
    write_certificates(&out.join("certificates.csv"), &certs)?;
    if cfg.output.iterations {
        write_table(&out.join("iterations.csv"), &ITERATION_HEADER, &iter_rows)?;
    }
    let _ = writeln!(text, "solution  max {:.6e}  min {:.6e}", u.max(), u.min());
    let _ = writeln!(text, "b field   max {:.6e}  min {:.6e}\n", b.max(), b.min());
    describe_certificates(&mut text, &certs);
    let outcome = certificate_outcome(&certs, "solve");
    let _ = writeln!(
        text,
        "result: {}",
        match &outcome {
            Ok(s) => s.clone(),
            Err(e) => e.to_string(),
        }
    );
    write_text(&out.join("report.txt"), &text)?;
    outcome
}

fn worst_margin(rep: &CertificateReport, prefix: &str) -> String {
    rep.entries
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .map(|c| c.margin)
        .reduce(f64::min)
        .map(num)
        .unwrap_or_default()
}

fn sweep_eps(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<Vec<String>>> {
    let mut prob = cfg.problem()?;
    if prob.source_class() == DataClass::Integrable {
        let (m, n) = (
            cfg.solver.m_list.last().copied().unwrap_or(1.0),
            cfg.solver.n_list.last().copied().unwrap_or(1.0),
        );
        prob = prob
            .with_source(truncate_data(prob.source(), m, n))
            .map_err(cfg_err)?
            .with_source_class(DataClass::Bounded);
    }
    let scfg = cfg.solver_config()?;
    let run = continuation_limit(&prob, &scfg).map_err(|e| solver_failure(out, e))?;
    let mut rows = Vec::new();
    for (k, ((eps, u, b), step)) in run.iterates.iter().zip(&run.report.steps).enumerate() {
        let opts = CertifyOptions {
            eps: *eps,
            delta: step.delta,
            bands: cfg.diagnostics.bands.clone(),
            tol: cfg.diagnostics.tol,
        };
        let rep = certify_renormalized(u, b, &prob, &opts).map_err(cfg_err)?;
        let cauchy = |v: &[f64]| if k == 0 { String::new() } else { num(v[k - 1]) };
        rows.push(vec![
            num(*eps),
            num(step.delta),
            step.iterations.to_string(),
            num(step.residual),
            cauchy(&run.report.cauchy_u),
            cauchy(&run.report.cauchy_b),
            worst_margin(&rep, "R1"),
            worst_margin(&rep, "R2"),
            worst_margin(&rep, "R3"),
        ]);
    }
    Ok(rows)
}

fn sweep_mn(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<Vec<String>>> {
    let prob = cfg.problem()?;
    let scfg = cfg.solver_config()?;
    let (ml, nl) = match prob.source_class() {
        DataClass::Integrable => (cfg.solver.m_list.clone(), cfg.solver.n_list.clone()),
        DataClass::Bounded => {
            // every clamp at or above ‖f‖_∞ is inactive: one row
            let top = prob.source().max_abs().max(1.0);
            (vec![top], vec![top])
        }
    };
    let l1 = solve_l1(&prob, &scfg, &ml, &nl, cfg.diagnostics.tol).map_err(|e| solver_failure(out, e))?;
    let mut rows = Vec::new();
    for (run, &(_, _, l1_margin)) in l1.runs.iter().zip(&l1.l1_margins) {
        let at = |o: &stefan_core::solver::OrderingCheck| o.lower == (run.m, run.n) || o.upper == (run.m, run.n);
        let ord = l1
            .orderings
            .iter()
            .filter(|o| at(o))
            .map(|o| o.margin)
            .reduce(f64::min)
            .map(num)
            .unwrap_or_default();
        let last = run.report.steps.last();
        rows.push(vec![
            num(run.m),
            num(run.n),
            run.report.total_iterations().to_string(),
            last.map(|s| num(s.residual)).unwrap_or_default(),
            num(l1_margin),
            ord,
            num(lp_norm(&run.b, 1.0).map_err(cfg_err)?),
        ]);
    }
    Ok(rows)
}

fn sweep_grid(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<Vec<String>>> {
    let scfg = cfg.solver_config()?;
    let dim = cfg.problem.cells.len();
    let exact = match &cfg.sweep.exact {
        Some(t) => Some(SourceExpr::parse(t, dim).map_err(CliError::Config)?),
        None => None,
    };
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for &c in &cfg.sweep.cells {
        let grid = cfg.grid_with_cells(&vec![c; dim])?;
        let prob = cfg.problem_on(&grid)?;
        let run = continuation_limit(&prob, &scfg).map_err(|e| solver_failure(out, e))?;
        let err = match &exact {
            Some(e) => {
                let mut bad = None;
                let v = reconstruction_error(&run.u, |x| {
                    e.eval(x).unwrap_or_else(|m| {
                        bad = Some(m);
                        f64::NAN
                    })
                });
                if let Some(m) = bad {
                    return Err(CliError::Config(m));
                }
                Some(v)
            }
            None => None,
        };
        let ratio = match (prev, err) {
            (Some(p), Some(e)) if e > 0.0 => num(p / e),
            _ => String::new(),
        };
        prev = err;
        rows.push(vec![
            c.to_string(),
            num(grid.max_spacing()),
            run.report.total_iterations().to_string(),
            run.report.steps.last().map(|s| num(s.residual)).unwrap_or_default(),
            err.map(num).unwrap_or_default(),
            ratio,
        ]);
    }
    Ok(rows)
}

pub fn sweep(cfg: &ExperimentConfig, param: SweepParam) -> CliResult<String> {
    let out = out_dir(cfg)?;
    let (header, rows): (&[&str], _) = match param {
        SweepParam::Eps => (
            &[
                "eps",
                "delta",
                "iterations",
                "residual",
                "cauchy_u",
                "cauchy_b",
                "margin_r1",
                "margin_r2",
                "margin_r3",
            ],
            sweep_eps(cfg, &out)?,
        ),
        SweepParam::Mn => (
            &[
                "m",
                "n",
                "iterations",
                "residual",
                "l1_margin",
                "ordering_margin",
                "b_l1",
            ],
            sweep_mn(cfg, &out)?,
        ),
        SweepParam::Grid => (
            &["cells", "h", "iterations", "residual", "error", "ratio"],
            sweep_grid(cfg, &out)?,
        ),
    };
    write_table(&out.join("sweep.csv"), header, &rows)?;
    Ok(format!("sweep: {} rows", rows.len()))
}

/// Structural checks without a solve: (H1)–(H3) on seeded samples and the
/// graph invariants.
pub fn check(cfg: &ExperimentConfig) -> CliResult<String> {
    let out = out_dir(cfg)?;
    let tol = cfg.diagnostics.tol;
    let flux = cfg.flux()?;
    let grid = cfg.grid()?;
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.diagnostics.seed);
    let component = |rng: &mut ChaCha8Rng| match rng.random_range(0..4) {
        0 => 0.0,
        1 => rng.random_range(-1e-3..1e-3),
        _ => rng.random_range(-10.0..10.0),
    };
    let samples: Vec<AssumptionSample> = (0..cfg.diagnostics.samples.max(1))
        .map(|_| {
            let x = (0..n)
                .map(|i| {
                    let (a, b) = grid.bounds(i);
                    rng.random_range(a..=b)
                })
                .collect();
            let xi: Vec<f64> = (0..n).map(|_| component(&mut rng)).collect();
            let mut eta: Vec<f64> = (0..n).map(|_| component(&mut rng)).collect();
            // pairs that differ in a single component
            if rng.random_bool(0.25) {
                let k = rng.random_range(0..n);
                for i in (0..n).filter(|&i| i != k) {
                    eta[i] = xi[i];
                }
            }
            AssumptionSample { x, xi, eta }
        })
        .collect();
    // the assumptions concern the unsmoothed flux
    let h = check_assumptions(&*flux, &samples, 0.0, tol).map_err(cfg_err)?;
    let lambda = flux.coercivity();
    let mut rep = CertificateReport::new();
    rep.push(Certificate::upper(
        "coercivity",
        anchors::COERCIVITY,
        lambda,
        lambda + h.coercivity.margin,
        tol,
    ));
    rep.push(Certificate::upper(
        "growth",
        anchors::GROWTH,
        1.0 - h.growth.margin,
        1.0,
        tol,
    ));
    rep.push(Certificate::upper(
        "monotonicity",
        anchors::MONOTONICITY,
        0.0,
        h.monotonicity.margin,
        tol,
    ));

    let beta = cfg.graph()?;
    rep.push(Certificate::upper(
        "0 in beta(0)",
        anchors::ZERO_IN_BETA,
        beta.distance_to_graph(0.0, 0.0),
        0.0,
        tol,
    ));
    let mut mono: f64 = 0.0;
    let mut resolvent: f64 = 0.0;
    let eps = *cfg.solver.epsilon_schedule.last().unwrap_or(&0.1);
    for _ in 0..cfg.diagnostics.samples.max(1) {
        let (r, s) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let (r, s) = if r < s { (r, s) } else { (s, r) };
        if let (Ok(a), Ok(b)) = (beta.minimal_selection(r), beta.minimal_selection(s)) {
            mono = mono.max(a - b);
        }
        let j = beta.resolvent(r, eps).map_err(cfg_err)?;
        let v = (r - j) / eps;
        let range = beta.eval(j).map_err(cfg_err)?;
        resolvent = resolvent.max(range.distance(v) / (1.0 + v.abs()));
    }
    rep.push(Certificate::upper(
        "graph monotone",
        anchors::GRAPH_MONOTONE,
        mono,
        0.0,
        tol,
    ));
    rep.push(Certificate::upper(
        format!("resolvent identity, eps = {eps}"),
        anchors::GRAPH_MONOTONE,
        resolvent,
        0.0,
        tol.max(1e-12),
    ));

    write_certificates(&out.join("certificates.csv"), &rep)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "check: flux `{}`, graph {:?}, {} samples\n",
        flux.name(),
        cfg.problem.graph,
        samples.len()
    );
    describe_certificates(&mut text, &rep);
    let outcome = certificate_outcome(&rep, "check");
    write_text(&out.join("report.txt"), &text)?;
    outcome
}

/// Smooth seeded Dirichlet field: a few products of sine modes.
fn random_mode_field(grid: &stefan_core::Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let n = grid.dim();
    let modes: Vec<(f64, Vec<f64>)> = (0..4)
        .map(|_| {
            let c = rng.random_range(-1.0..1.0);
            let k = (0..n).map(|_| rng.random_range(1..=4) as f64).collect();
            (c, k)
        })
        .collect();
    GridFunction::dirichlet_from_fn(grid, |x| {
        modes
            .iter()
            .map(|(c, k)| {
                c * (0..n)
                    .map(|i| {
                        let (a, b) = grid.bounds(i);
                        (std::f64::consts::PI * k[i] * (x[i] - a) / (b - a)).sin()
                    })
                    .product::<f64>()
            })
            .sum()
    })
}

pub fn embeddings(cfg: &ExperimentConfig) -> CliResult<String> {
    let out = out_dir(cfg)?;
    let grid = cfg.grid()?;
    let exps = AnisotropicExponents::new(&cfg.problem.p).map_err(cfg_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.diagnostics.seed);
    let n = grid.dim();
    let mut fields = vec![GridFunction::dirichlet_from_fn(&grid, |x| {
        (0..n)
            .map(|i| {
                let (a, b) = grid.bounds(i);
                (std::f64::consts::PI * (x[i] - a) / (b - a)).sin()
            })
            .product()
    })];
    while fields.len() < cfg.diagnostics.embedding_fields + 1 {
        let u = random_mode_field(&grid, &mut rng);
        if u.max_abs() > 1e-8 {
            fields.push(u);
        }
    }
    let mut rows = Vec::new();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "embeddings: grid {:?}, p = {:?}, {} fields (field 0 is the sine bump)\n",
        grid.cells(),
        exps.p(),
        fields.len()
    );
    let mut all = stefan_core::embeddings::EmbeddingReport::new();
    for (k, u) in fields.iter().enumerate() {
        let rep = measure(std::slice::from_ref(u), &exps, cfg.diagnostics.sobolev_q).map_err(|e| match e {
            Error::InvalidParameter(m) => CliError::Certificate(m),
            other => cfg_err(other),
        })?;
        for e in &rep.entries {
            rows.push(vec![
                k.to_string(),
                e.name.clone(),
                e.anchor.to_string(),
                num(e.q),
                e.p.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"),
                num(e.ratio),
            ]);
        }
        all.extend(rep);
    }
    write_table(
        &out.join("embeddings.csv"),
        &["field", "name", "anchor", "q", "p", "ratio"],
        &rows,
    )?;
    for name in [
        stefan_core::embeddings::POINCARE,
        stefan_core::embeddings::SOBOLEV_GEOMETRIC,
        stefan_core::embeddings::SOBOLEV_ARITHMETIC,
    ] {
        match all.worst(name) {
            Some(v) => {
                let _ = writeln!(text, "  {name:<20} measured constant {v:.6e}");
            }
            None => {
                let _ = writeln!(text, "  {name:<20} not measured (p_bar >= N and no sobolev_q)");
            }
        }
    }
    write_text(&out.join("report.txt"), &text)?;
    Ok(format!("embeddings: {} rows", rows.len()))
}
