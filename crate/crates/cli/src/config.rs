//! TOML run configuration and its translation into core types.

use std::path::PathBuf;
use std::sync::Arc;

use kirchhoff_core::linalg::PreconditionerKind;
use kirchhoff_core::problem::PowerTerm;
use kirchhoff_core::{
    Exponents, KirchhoffCoeffs, Mesh, Nonlinearity, ProblemSpecF64, ProjectionOptions, QuadratureRule, Rect,
    SolverOptions, Weight,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Check,
    SolvePositive,
    SolveNegative,
    SolveNodal,
    Sweep,
    FiberPlot,
    Report,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Check => "check",
            Self::SolvePositive => "solve-positive",
            Self::SolveNegative => "solve-negative",
            Self::SolveNodal => "solve-nodal",
            Self::Sweep => "sweep",
            Self::FiberPlot => "fiber-plot",
            Self::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuConfig {
    /// `constant` (params `[c]`), `linear` (`[base, slope]`, `μ = base + slope·x₁`)
    /// or `checkerboard` (`[low, high, period]`).
    pub family: String,
    pub params: Vec<f64>,
}

impl Default for MuConfig {
    fn default() -> Self {
        Self {
            family: "linear".into(),
            params: vec![0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearityConfig {
    /// `[c, r]` pairs of `f(s) = Σ c·|s|^{r−2}s`.
    pub terms: Vec<[f64; 2]>,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        Self { terms: vec![[1.0, 4.0]] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { nx: 32, ny: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainConfig {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub a0: f64,
    pub b0: f64,
    /// `midpoint` or `vertex`.
    pub quadrature: String,
    pub mu: MuConfig,
    pub f: NonlinearityConfig,
    pub mesh: MeshConfig,
    pub domain: DomainConfig,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            p: 1.5,
            q: 2.0,
            theta: 1.5,
            a0: 1.0,
            b0: 1.0,
            quadrature: "midpoint".into(),
            mu: MuConfig::default(),
            f: NonlinearityConfig::default(),
            mesh: MeshConfig::default(),
            domain: DomainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub backtrack: f64,
    /// `auto`, `identity`, `laplacian` or `weighted`.
    pub preconditioner: String,
    pub path_nodes: usize,
    pub reequidistribute: usize,
    pub starts: usize,
    pub projection_tol: f64,
    pub face_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverOptions::<f64>::default();
        Self {
            tol: s.tol,
            max_iter: s.max_iter,
            armijo: s.armijo,
            backtrack: s.backtrack,
            preconditioner: "auto".into(),
            path_nodes: s.path_nodes,
            reequidistribute: s.reequidistribute,
            starts: s.starts,
            projection_tol: s.projection.tol,
            face_samples: s.projection.face_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// One of `p`, `q`, `theta`, `a0`, `b0`, `r`.
    pub parameter: String,
    pub values: Vec<f64>,
}

pub const SWEEP_PARAMETERS: [&str; 6] = ["p", "q", "theta", "a0", "b0", "r"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Rows are the Cartesian product of all axes, first axis slowest.
    pub axes: Vec<SweepAxis>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axes: vec![SweepAxis {
                parameter: "theta".into(),
                values: vec![1.0, 1.25, 1.5],
            }],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberConfig {
    /// Grid points per axis.
    pub grid: usize,
    /// Field file of the start function; a seeded random sign-changing
    /// function when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<PathBuf>,
}

impl Default for FiberConfig {
    fn default() -> Self {
        Self { grid: 41, start: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Output directory; falls back to `$KIRCHHOFF_OUT`, then `kirchhoff-out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Concurrent sweep rows.
    pub workers: usize,
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub fiber: FiberConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Check,
            seed: 42,
            out: None,
            workers: 1,
            problem: ProblemConfig::default(),
            solver: SolverConfig::default(),
            sweep: SweepConfig::default(),
            fiber: FiberConfig::default(),
        }
    }
}

pub const OUT_ENV: &str = "KIRCHHOFF_OUT";
pub const DEFAULT_OUT: &str = "kirchhoff-out";

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    /// Checks everything that can be checked without building the problem.
    /// Mathematical hypotheses are left to the checker.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.solver;
        for (name, v) in [
            ("solver.tol", s.tol),
            ("solver.armijo", s.armijo),
            ("solver.projection_tol", s.projection_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(format!("{name} must be positive, got {v}")));
            }
        }
        if !(s.backtrack > 0.0 && s.backtrack < 1.0) {
            return Err(config_err(format!("solver.backtrack must lie in (0, 1), got {}", s.backtrack)));
        }
        if s.starts == 0 || s.max_iter == 0 || s.face_samples < 2 || s.path_nodes < 3 {
            return Err(config_err("solver.starts, max_iter must be positive, face_samples >= 2, path_nodes >= 3"));
        }
        if s.preconditioner != "auto" && PreconditionerKind::parse(&s.preconditioner).is_none() {
            return Err(config_err(format!("unknown preconditioner {:?}", s.preconditioner)));
        }
        if self.workers == 0 {
            return Err(config_err("workers must be at least 1"));
        }
        if self.fiber.grid < 4 {
            return Err(config_err("fiber.grid must be at least 4"));
        }
        let p = &self.problem;
        if p.mesh.nx < 2 || p.mesh.ny < 2 {
            return Err(config_err("mesh.nx and mesh.ny must be at least 2"));
        }
        if QuadratureRule::parse(&p.quadrature).is_none() {
            return Err(config_err(format!("unknown quadrature {:?}", p.quadrature)));
        }
        weight(&p.mu)?;
        if p.f.terms.is_empty() {
            return Err(config_err("f.terms must not be empty"));
        }
        if self.mode == Mode::Sweep && self.sweep.axes.is_empty() {
            return Err(config_err("sweep mode needs at least one axis"));
        }
        for axis in &self.sweep.axes {
            if !SWEEP_PARAMETERS.contains(&axis.parameter.as_str()) {
                return Err(config_err(format!(
                    "unknown sweep parameter {:?}; expected one of {:?}",
                    axis.parameter, SWEEP_PARAMETERS
                )));
            }
            if axis.values.is_empty() {
                return Err(config_err(format!("sweep axis {:?} has no values", axis.parameter)));
            }
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions<f64> {
        let s = &self.solver;
        SolverOptions {
            tol: s.tol,
            max_iter: s.max_iter,
            armijo: s.armijo,
            backtrack: s.backtrack,
            preconditioner: PreconditionerKind::parse(&s.preconditioner),
            path_nodes: s.path_nodes,
            reequidistribute: s.reequidistribute,
            starts: s.starts,
            seed: self.seed,
            projection: self.projection_options(),
            ..SolverOptions::default()
        }
    }

    pub fn projection_options(&self) -> ProjectionOptions<f64> {
        ProjectionOptions {
            tol: self.solver.projection_tol,
            face_samples: self.solver.face_samples,
            ..ProjectionOptions::default()
        }
    }
}

fn weight(mu: &MuConfig) -> Result<Weight<f64>, CliError> {
    let need = |n: usize| {
        if mu.params.len() == n {
            Ok(())
        } else {
            Err(config_err(format!("mu family {:?} takes {n} params, got {}", mu.family, mu.params.len())))
        }
    };
    match mu.family.as_str() {
        "constant" => {
            need(1)?;
            Ok(Weight::Constant(mu.params[0]))
        }
        "linear" => {
            need(2)?;
            Ok(Weight::Linear {
                base: mu.params[0],
                slope: mu.params[1],
            })
        }
        "checkerboard" => {
            need(3)?;
            Ok(Weight::Checkerboard {
                low: mu.params[0],
                high: mu.params[1],
                period: mu.params[2],
            })
        }
        other => Err(config_err(format!("unknown mu family {other:?}"))),
    }
}

impl ProblemConfig {
    /// Builds the problem without the composite growth checks, which belong
    /// to the hypothesis checker. Structurally impossible inputs (such as
    /// `ϑ < 1` or a negative power coefficient) are configuration errors.
    pub fn build(&self) -> Result<ProblemSpecF64, CliError> {
        let core = |e: kirchhoff_core::Error| config_err(e.to_string());
        let rect = Rect::new(self.domain.x0, self.domain.x1, self.domain.y0, self.domain.y1);
        let mesh = Mesh::build(rect, self.mesh.nx, self.mesh.ny).map_err(core)?;
        let terms = self.f.terms.iter().map(|&[c, r]| PowerTerm { c, r }).collect();
        Ok(ProblemSpecF64 {
            exps: Exponents::unchecked(self.p, self.q),
            mu: weight(&self.mu)?,
            kirchhoff: KirchhoffCoeffs::new(self.a0, self.b0, self.theta).map_err(core)?,
            f: Nonlinearity::power_sum(terms).map_err(core)?,
            mesh: Arc::new(mesh),
            quadrature: QuadratureRule::parse(&self.quadrature).expect("validated"),
        })
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self, CliError> {
        let mut c = self.clone();
        match name {
            "p" => c.p = value,
            "q" => c.q = value,
            "theta" => c.theta = value,
            "a0" => c.a0 = value,
            "b0" => c.b0 = value,
            "r" => {
                if c.f.terms.len() != 1 {
                    return Err(config_err("sweeping r needs a single-term nonlinearity"));
                }
                c.f.terms[0][1] = value;
            }
            other => return Err(config_err(format!("unknown sweep parameter {other:?}"))),
        }
        Ok(c)
    }
}
