//! Experiment configuration files (TOML).
//!
//! ```toml
//! [problem]
//! cells = [64, 64]                 # cells per axis
//! bounds = [[0, 1], [0, 1]]        # optional, unit box by default
//! p = [2.0, 3.0]
//! graph = "stefan:1"               # or an explicit table, see GraphSpec
//! flux = "power"                   # power | adversarial
//! convection = "zero"              # zero | linear:[c1, c2] | poly:d
//! source = "100*exp(-((x-0.5)^2 + (y-0.5)^2)/0.01)"
//! # source_csv = "f.csv"           # alternative to `source`
//! data_class = "bounded"           # bounded | integrable
//!
//! [solver]
//! epsilon_schedule = [1, 0.3, 0.1, 0.03, 0.01]
//! tol_residual = 1e-8
//! delta = "auto"                   # auto | number | list matching the schedule
//! m_list = [1, 2, 4, 8]            # truncation levels for integrable data
//! n_list = [1, 2, 4, 8]
//!
//! [diagnostics]
//! certificates = ["renormalized", "estimates", "levelset"]
//! bands = [0, 1, 2, 4, 8]
//! levels = [1, 2, 4, 8]
//! tol = 1e-8
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use stefan_core::flux::flux_from_name;
use stefan_core::graph::{Branch, Domain};
use stefan_core::solver::{DeltaCoupling, NewtonConfig};
use stefan_core::{
    ConvectionModel, DataClass, FluxModel, Grid, GridFunction, MonotoneGraph, ProblemSpec, SolverConfig,
};

use crate::error::{CliError, CliResult};
use crate::expr::SourceExpr;
use crate::io::read_field;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: SweepSection,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub cells: Vec<usize>,
    pub bounds: Option<Vec<[f64; 2]>>,
    pub p: Vec<f64>,
    pub graph: GraphSpec,
    #[serde(default = "default_flux")]
    pub flux: String,
    #[serde(default = "default_convection")]
    pub convection: String,
    pub source: Option<String>,
    pub source_csv: Option<PathBuf>,
    #[serde(default = "default_class")]
    pub data_class: String,
}

/// Graph literal: a preset name (`identity`, `zero`, `stefan:L`, `power:q`,
/// `shifted_linear:c`) or an explicit list of jumps and branches.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Preset(String),
    Explicit(ExplicitGraph),
}

/// `branches[k]` lives between `jumps[k − 1]` and `jumps[k]`; the value
/// interval at each jump is filled from the neighbouring branches.
/// `domain = [lo, hi]` accepts `-inf` / `inf`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGraph {
    #[serde(default)]
    pub jumps: Vec<f64>,
    pub branches: Vec<BranchSpec>,
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BranchSpec {
    Affine { slope: f64, intercept: f64 },
    Power { coefficient: f64, exponent: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Name(String),
    Value(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub epsilon_schedule: Vec<f64>,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub damping_min: f64,
    pub picard_fallback: bool,
    pub picard_max_iter: usize,
    pub delta: DeltaSpec,
    pub cauchy_tol: f64,
    pub m_list: Vec<f64>,
    pub n_list: Vec<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSection {
            epsilon_schedule: d.epsilon_schedule,
            tol_residual: d.newton.tol_residual,
            max_iter: d.newton.max_iter,
            damping_min: d.newton.damping_min,
            picard_fallback: d.picard_fallback,
            picard_max_iter: d.picard_max_iter,
            delta: DeltaSpec::Name("auto".into()),
            cauchy_tol: d.cauchy_tol,
            m_list: vec![1.0, 2.0, 4.0, 8.0],
            n_list: vec![1.0, 2.0, 4.0, 8.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Any of `renormalized`, `estimates`, `levelset`, `comparison`,
    /// `uniqueness`.
    pub certificates: Vec<String>,
    pub bands: Vec<f64>,
    pub levels: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
    /// Number of random `(ξ, η)` samples for `check`.
    pub samples: usize,
    /// Number of random fields measured by `embeddings`.
    pub embedding_fields: usize,
    /// Sobolev exponent used when `p̄ ≥ N`.
    pub sobolev_q: Option<f64>,
    /// Shift `f̃ = f + shift` for the comparison certificate.
    pub comparison_shift: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            certificates: vec!["renormalized".into(), "estimates".into(), "levelset".into()],
            bands: vec![0.0, 1.0, 2.0, 4.0, 8.0],
            levels: vec![1.0, 2.0, 4.0, 8.0],
            tol: 1e-8,
            seed: 0,
            samples: 256,
            embedding_fields: 20,
            sobolev_q: None,
            comparison_shift: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub iterations: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            iterations: true,
        }
    }
}

/// Parameters of `sweep --param grid`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Cells per axis for each grid of the sweep.
    pub cells: Vec<usize>,
    /// Exact solution for the error column.
    pub exact: Option<String>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            cells: vec![16, 32, 64],
            exact: None,
        }
    }
}

fn default_flux() -> String {
    "power".into()
}

fn default_convection() -> String {
    "zero".into()
}

fn default_class() -> String {
    "bounded".into()
}

const CERTIFICATES: [&str; 5] = ["renormalized", "estimates", "levelset", "comparison", "uniqueness"];

fn core_err(e: stefan_core::Error) -> CliError {
    CliError::config(e)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(CliError::config)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        let p = &self.problem;
        if p.p.len() != p.cells.len() {
            return Err(CliError::config(format!(
                "p has {} entries for a {}-dimensional grid",
                p.p.len(),
                p.cells.len()
            )));
        }
        let p_minus = p.p.iter().copied().fold(f64::INFINITY, f64::min);
        if !(p_minus > 1.0) {
            return Err(CliError::config(format!(
                "exponents p = {:?} violate the requirement p⁻ > 1 (p⁻ = {p_minus})",
                p.p
            )));
        }
        match (&p.source, &p.source_csv) {
            (Some(_), Some(_)) => return Err(CliError::config("give either `source` or `source_csv`, not both")),
            (None, None) => return Err(CliError::config("missing `source` or `source_csv`")),
            _ => {}
        }
        if let Some(expr) = &p.source {
            SourceExpr::parse(expr, p.cells.len()).map_err(CliError::Config)?;
        }
        self.data_class()?;
        for c in &self.diagnostics.certificates {
            if !CERTIFICATES.contains(&c.as_str()) {
                return Err(CliError::config(format!(
                    "unknown certificate `{c}` (expected one of {})",
                    CERTIFICATES.join(", ")
                )));
            }
        }
        let d = &self.diagnostics;
        if d.bands.iter().any(|b| !(*b >= 0.0)) || d.bands.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("bands must be nonnegative and increasing"));
        }
        if d.levels.len() < 2 || d.levels.iter().any(|l| !(*l >= 1.0)) || d.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("levels must be at least two increasing values >= 1"));
        }
        if !(d.tol >= 0.0) {
            return Err(CliError::config("diagnostics tol must be nonnegative"));
        }
        self.solver_config()?;
        self.graph()?;
        Ok(())
    }

    pub fn data_class(&self) -> CliResult<DataClass> {
        match self.problem.data_class.as_str() {
            "bounded" => Ok(DataClass::Bounded),
            "integrable" => Ok(DataClass::Integrable),
            other => Err(CliError::config(format!(
                "data_class must be `bounded` or `integrable`, got `{other}`"
            ))),
        }
    }

    pub fn wants(&self, certificate: &str) -> bool {
        self.diagnostics.certificates.iter().any(|c| c == certificate)
    }

    pub fn grid_with_cells(&self, cells: &[usize]) -> CliResult<Grid> {
        let bounds: Vec<(f64, f64)> = match &self.problem.bounds {
            Some(b) => b.iter().map(|[a, c]| (*a, *c)).collect(),
            None => vec![(0.0, 1.0); cells.len()],
        };
        Grid::new(cells, &bounds).map_err(core_err)
    }

    pub fn grid(&self) -> CliResult<Grid> {
        self.grid_with_cells(&self.problem.cells)
    }

    pub fn graph(&self) -> CliResult<MonotoneGraph> {
        match &self.problem.graph {
            GraphSpec::Preset(name) => MonotoneGraph::from_preset(name).map_err(core_err),
            GraphSpec::Explicit(g) => {
                let branches = g
                    .branches
                    .iter()
                    .map(|b| match *b {
                        BranchSpec::Affine { slope, intercept } => Branch::Affine { slope, intercept },
                        BranchSpec::Power { coefficient, exponent } => Branch::Power { coefficient, exponent },
                    })
                    .collect();
                let domain = match g.domain {
                    None => Domain::REAL_LINE,
                    Some([lo, hi]) => Domain {
                        lower: lo.is_finite().then_some(lo),
                        upper: hi.is_finite().then_some(hi),
                    },
                };
                MonotoneGraph::piecewise(&g.jumps, branches, domain).map_err(core_err)
            }
        }
    }

    pub fn flux(&self) -> CliResult<Arc<dyn FluxModel>> {
        Ok(Arc::from(
            flux_from_name(&self.problem.flux, &self.problem.p).map_err(core_err)?,
        ))
    }

    pub fn convection(&self) -> CliResult<ConvectionModel> {
        ConvectionModel::parse(&self.problem.convection, self.problem.cells.len()).map_err(core_err)
    }

    pub fn source_on(&self, grid: &Grid) -> CliResult<GridFunction> {
        if let Some(text) = &self.problem.source {
            let expr = SourceExpr::parse(text, grid.dim()).map_err(CliError::Config)?;
            let mut values = Vec::with_capacity(grid.node_count());
            for n in 0..grid.node_count() {
                let x = grid.coordinates(n);
                values.push(expr.eval(&x[..grid.dim()]).map_err(CliError::Config)?);
            }
            return GridFunction::new(grid.clone(), values).map_err(core_err);
        }
        let path = self.base_dir.join(self.problem.source_csv.as_ref().expect("validated"));
        read_field(&path, grid)
    }

    pub fn problem_on(&self, grid: &Grid) -> CliResult<ProblemSpec> {
        let source = self.source_on(grid)?;
        ProblemSpec::new(
            self.graph()?,
            self.flux()?,
            self.convection()?,
            source,
            self.data_class()?,
        )
        .map_err(core_err)
    }

    pub fn problem(&self) -> CliResult<ProblemSpec> {
        self.problem_on(&self.grid()?)
    }

    pub fn solver_config(&self) -> CliResult<SolverConfig> {
        let s = &self.solver;
        let delta = match &s.delta {
            DeltaSpec::Name(n) if n == "auto" => DeltaCoupling::Auto,
            DeltaSpec::Name(n) => {
                return Err(CliError::config(format!(
                    "delta must be `auto`, a number or a list, got `{n}`"
                )))
            }
            DeltaSpec::Value(v) => DeltaCoupling::Fixed(*v),
            DeltaSpec::List(v) => DeltaCoupling::Schedule(v.clone()),
        };
        let cfg = SolverConfig {
            epsilon_schedule: s.epsilon_schedule.clone(),
            newton: NewtonConfig {
                tol_residual: s.tol_residual,
                max_iter: s.max_iter,
                damping_min: s.damping_min,
            },
            picard_fallback: s.picard_fallback,
            picard_max_iter: s.picard_max_iter,
            delta,
            cauchy_tol: s.cauchy_tol,
        };
        cfg.validate().map_err(core_err)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[problem]
cells = [8]
p = [2.0]
graph = "identity"
source = "1"
"#;

    #[test]
    fn defaults_apply() {
        let c = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(c.solver.epsilon_schedule.len(), 7);
        assert_eq!(c.diagnostics.bands, vec![0.0, 1.0, 2.0, 4.0, 8.0]);
        assert_eq!(c.data_class().unwrap(), DataClass::Bounded);
        let p = c.problem().unwrap();
        assert_eq!(p.source().values(), &[1.0; 9]);
    }

    #[test]
    fn explicit_graph_table() {
        let text = r#"
[problem]
cells = [8]
p = [2.0]
source = "1"
graph = { jumps = [0.0], branches = [{ slope = 1.0, intercept = 0.0 }, { slope = 2.0, intercept = 3.0 }] }
"#;
        let c = ExperimentConfig::parse(text).unwrap();
        let g = c.graph().unwrap();
        assert_eq!(g.breakpoints()[0].upper, 3.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad_p = BASIC.replace("p = [2.0]", "p = [0.5]");
        let err = ExperimentConfig::parse(&bad_p).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("p⁻ > 1"));
        for (from, to) in [
            ("graph = \"identity\"", "graph = \"nope\""),
            ("source = \"1\"", "source = \"q +\""),
            ("cells = [8]", "cells = [8]\nunknown = 1"),
        ] {
            assert!(ExperimentConfig::parse(&BASIC.replace(from, to)).is_err(), "{to}");
        }
        let sched = format!("{BASIC}\n[solver]\nepsilon_schedule = [0.1, 0.3]\n");
        assert!(ExperimentConfig::parse(&sched).is_err());
    }
}
