//! Mode handlers. Every handler writes its artifacts before deciding the
//! exit status, so a nonconverged or failing run still leaves files behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kirchhoff_core::io::{field_from_text, field_to_text, summary_row, trace_to_text, SUMMARY_HEADER};
use kirchhoff_core::nehari::{fiber_max_check, project_to_m};
use kirchhoff_core::problem::{check_hypotheses, default_sample_grid};
use kirchhoff_core::solvers::{
    minimize_over_m, mountain_pass, nodal_runs, nodal_start, small_sphere_level, truncation_consistency,
};
use kirchhoff_core::{Functional, HypothesisReport, ProblemSpecF64, Sign, SolutionKind, SolveOutcome};
use rayon::prelude::*;

use crate::config::{Mode, ProblemConfig, RunConfig};
use crate::{CliError, EXIT_HYPOTHESIS, EXIT_NONCONVERGED, EXIT_OK};

pub const HYPOTHESES_FILE: &str = "hypotheses.txt";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const FIBER_FILE: &str = "fiber.csv";
pub const FIBER_SUMMARY_FILE: &str = "fiber-summary.txt";
pub const REPORT_FILE: &str = "report.txt";
pub const STARTS_FILE: &str = "starts-nodal.csv";

pub fn summary_file(kind: SolutionKind) -> String {
    format!("summary-{}.csv", kind.name())
}

pub fn field_file(kind: SolutionKind) -> String {
    format!("field-{}.csv", kind.name())
}

pub fn trace_file(kind: SolutionKind) -> String {
    format!("trace-{}.csv", kind.name())
}

/// Wrong-sign tolerance for constant-sign solutions and the floor on the
/// part norms of nodal ones.
const SIGN_TOL: f64 = 1e-10;
const PART_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// Files written, in order.
    pub artifacts: Vec<PathBuf>,
    /// One-line notes for the terminal.
    pub messages: Vec<String>,
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
    messages: Vec<String>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
        Ok(Self {
            dir,
            written: Vec::new(),
            messages: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path);
        Ok(())
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.messages.push(msg.into());
    }

    fn finish(self, exit_code: i32) -> RunOutcome {
        RunOutcome {
            exit_code,
            artifacts: self.written,
            messages: self.messages,
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let mut arts = Artifacts::new(cfg.out_dir())?;
    let code = match cfg.mode {
        Mode::Check => run_check(cfg, &mut arts)?,
        Mode::SolvePositive => run_solve(cfg, SolutionKind::Positive, &mut arts)?,
        Mode::SolveNegative => run_solve(cfg, SolutionKind::Negative, &mut arts)?,
        Mode::SolveNodal => run_solve(cfg, SolutionKind::Nodal, &mut arts)?,
        Mode::Sweep => run_sweep(cfg, &mut arts)?,
        Mode::FiberPlot => run_fiber(cfg, &mut arts)?,
        Mode::Report => {
            let text = crate::render_report(&arts.dir);
            arts.write(REPORT_FILE, &text)?;
            EXIT_OK
        }
    };
    Ok(arts.finish(code))
}

fn hypotheses(spec: &ProblemSpecF64) -> Result<HypothesisReport, CliError> {
    Ok(check_hypotheses(spec, &default_sample_grid())?)
}

fn run_check(cfg: &RunConfig, arts: &mut Artifacts) -> Result<i32, CliError> {
    let report = hypotheses(&cfg.problem.build()?)?;
    arts.write(HYPOTHESES_FILE, &report.to_text())?;
    if report.all_pass() {
        arts.note("hypotheses: all pass");
        Ok(EXIT_OK)
    } else {
        arts.note(format!("hypotheses failed: {}", report.failed_ids().join(" ")));
        Ok(EXIT_HYPOTHESIS)
    }
}

/// Builds the functional after the hypothesis gate. `Err(code)` means the
/// gate failed and the report has been written.
fn gated_functional(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Result<Functional<f64>, i32>, CliError> {
    let spec = cfg.problem.build()?;
    let report = hypotheses(&spec)?;
    arts.write(HYPOTHESES_FILE, &report.to_text())?;
    if !report.all_pass() {
        arts.note(format!("hypotheses failed: {}", report.failed_ids().join(" ")));
        return Ok(Err(EXIT_HYPOTHESIS));
    }
    Ok(Ok(Functional::new(spec)?))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Key-value header and checks for one outcome. The checks decide the exit
/// status together with convergence.
fn invariants(f: &Functional<f64>, o: &SolveOutcome<f64>, cfg: &RunConfig) -> Result<(Vec<(String, String)>, bool), CliError> {
    let mut kv: Vec<(String, String)> = Vec::new();
    let mut ok = o.converged;
    let mut check = |kv: &mut Vec<(String, String)>, key: &str, pass: bool| {
        ok &= pass;
        kv.push((key.into(), verdict(pass).into()));
    };
    kv.push(("kind".into(), o.kind.name().into()));
    kv.push(("seed".into(), cfg.seed.to_string()));
    kv.push(("tol".into(), cfg.solver.tol.to_string()));
    check(&mut kv, "converged", o.converged);
    check(&mut kv, "residual_within_tol", o.residual_norm <= cfg.solver.tol);
    check(&mut kv, "energy_positive", o.energy > 0.0);
    match o.kind {
        SolutionKind::Positive | SolutionKind::Negative => {
            check(&mut kv, "sign_invariant", o.sign_invariant(f, SIGN_TOL));
            let t = truncation_consistency(f, o)?;
            kv.push(("wrong_part_modular".into(), t.wrong_part_modular.to_string()));
            check(&mut kv, "truncation", t.holds);
            let sign = if o.kind == SolutionKind::Positive { Sign::Plus } else { Sign::Minus };
            let radius = 0.1 * f.norm(&o.solution)?;
            let level = small_sphere_level(f, sign, radius, 16, cfg.seed)?;
            kv.push(("small_sphere_radius".into(), radius.to_string()));
            kv.push(("small_sphere_level".into(), level.to_string()));
            check(&mut kv, "above_small_sphere", o.energy > level);
        }
        SolutionKind::Nodal => {
            let (plus, minus) = o.solution.split_parts();
            let (np, nm) = (f.norm(&plus)?, f.norm(&minus)?);
            kv.push(("plus_norm".into(), np.to_string()));
            kv.push(("minus_norm".into(), nm.to_string()));
            check(&mut kv, "sign_invariant", np >= PART_FLOOR && nm >= PART_FLOOR);
            let ep = f.phi(&plus).phi;
            let em = f.phi(&minus.scale(-1.0)).phi;
            kv.push(("phi_plus_part".into(), ep.to_string()));
            kv.push(("phi_minus_part".into(), em.to_string()));
            kv.push(("decomposition_gap".into(), (o.energy - ep - em).to_string()));
            if let Some(pair) = &o.pair {
                kv.push(("alpha".into(), pair.alpha.to_string()));
                kv.push(("beta".into(), pair.beta.to_string()));
                kv.push(("pair_relative_residual".into(), pair.relative_residual().to_string()));
            }
        }
    }
    Ok((kv, ok))
}

fn summary_text(kv: &[(String, String)], rows: &[String]) -> String {
    let mut s = String::new();
    for (k, v) in kv {
        let _ = writeln!(s, "# {k}={v}");
    }
    s.push_str(SUMMARY_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

fn run_solve(cfg: &RunConfig, kind: SolutionKind, arts: &mut Artifacts) -> Result<i32, CliError> {
    let f = match gated_functional(cfg, arts)? {
        Ok(f) => f,
        Err(code) => return Ok(code),
    };
    let opts = cfg.solver_options();
    let mut outcome = match kind {
        SolutionKind::Positive => mountain_pass(&f, Sign::Plus, &opts)?,
        SolutionKind::Negative => mountain_pass(&f, Sign::Minus, &opts)?,
        SolutionKind::Nodal => {
            let runs = nodal_runs(&f, &opts)?;
            let mut rows = Vec::new();
            for (i, r) in runs.iter().enumerate() {
                match r {
                    Ok(o) => rows.push(summary_row(o)),
                    Err(e) => arts.note(format!("start {} failed: {e}", cfg.seed.wrapping_add(i as u64))),
                }
            }
            arts.write(STARTS_FILE, &summary_text(&[], &rows))?;
            pick_best(runs)?
        }
    };
    outcome.seed.get_or_insert(cfg.seed);
    let (kv, ok) = invariants(&f, &outcome, cfg)?;
    arts.write(&summary_file(kind), &summary_text(&kv, &[summary_row(&outcome)]))?;
    arts.write(&field_file(kind), &field_to_text(&outcome.solution))?;
    arts.write(&trace_file(kind), &trace_to_text(&outcome.trace))?;
    arts.note(format!(
        "{}: energy {} residual {:e} after {} iterations{}",
        kind.name(),
        outcome.energy,
        outcome.residual_norm,
        outcome.iterations,
        if outcome.converged { "" } else { " (not converged)" }
    ));
    Ok(if ok { EXIT_OK } else { EXIT_NONCONVERGED })
}

/// Same selection rule as `minimize_over_m`, applied to runs already in hand.
fn pick_best(runs: Vec<kirchhoff_core::Result<SolveOutcome<f64>>>) -> Result<SolveOutcome<f64>, CliError> {
    let mut best: Option<SolveOutcome<f64>> = None;
    let mut first_err = None;
    for run in runs {
        match run {
            Ok(o) => {
                let better = match &best {
                    None => true,
                    Some(b) => (o.converged && !b.converged) || (o.converged == b.converged && o.energy < b.energy),
                };
                if better {
                    best = Some(o);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => Err(first_err.expect("at least one start").into()),
    }
}

/// Parameter combinations, first axis slowest.
fn sweep_grid(cfg: &RunConfig) -> Vec<Vec<f64>> {
    let mut grid = vec![Vec::new()];
    for axis in &cfg.sweep.axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut row = prefix.clone();
                    row.push(v);
                    row
                })
            })
            .collect();
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    /// `(energy, residual, converged)` for the positive, negative and nodal
    /// solutions; `None` when not computed.
    pub solutions: [Option<(f64, f64, bool)>; 3],
    pub status: String,
}

impl SweepRow {
    pub fn header(names: &[String]) -> String {
        let mut cols: Vec<String> = names.to_vec();
        for k in ["plus", "minus", "0"] {
            cols.push(format!("m{k}"));
            cols.push(format!("res{k}"));
            cols.push(format!("conv{k}"));
        }
        cols.push("status".into());
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut cols: Vec<String> = self.params.iter().map(|v| v.to_string()).collect();
        for s in &self.solutions {
            match s {
                Some((e, r, c)) => cols.extend([e.to_string(), r.to_string(), c.to_string()]),
                None => cols.extend([String::new(), String::new(), String::new()]),
            }
        }
        cols.push(self.status.clone());
        cols.join(",")
    }

    fn all_converged(&self) -> bool {
        self.solutions.iter().all(|s| matches!(s, Some((_, _, true))))
    }
}

fn sweep_row(cfg: &RunConfig, names: &[String], params: &[f64]) -> SweepRow {
    let mut row = SweepRow {
        params: params.to_vec(),
        solutions: [None; 3],
        status: String::new(),
    };
    let problem = names
        .iter()
        .zip(params)
        .try_fold(cfg.problem.clone(), |p, (n, &v)| p.with_parameter(n, v));
    let result = problem.and_then(|p| solve_row(cfg, &p, &mut row.solutions));
    row.status = match result {
        Ok(None) if row.all_converged() => "ok".into(),
        Ok(None) => "nonconverged".into(),
        Ok(Some(failed)) => format!("hypotheses-failed {failed}"),
        Err(e) => format!("error {}", e.to_string().replace(',', ";")),
    };
    row
}

/// Fills the solution slots. `Ok(Some(ids))` when the hypothesis gate fails.
fn solve_row(cfg: &RunConfig, problem: &ProblemConfig, slots: &mut [Option<(f64, f64, bool)>; 3]) -> Result<Option<String>, CliError> {
    let spec = problem.build()?;
    let report = hypotheses(&spec)?;
    if !report.all_pass() {
        return Ok(Some(report.failed_ids().join(" ")));
    }
    let f = Functional::new(spec)?;
    let opts = cfg.solver_options();
    let entry = |o: SolveOutcome<f64>| Some((o.energy, o.residual_norm, o.converged));
    slots[0] = entry(mountain_pass(&f, Sign::Plus, &opts)?);
    slots[1] = entry(mountain_pass(&f, Sign::Minus, &opts)?);
    slots[2] = entry(minimize_over_m(&f, &opts)?);
    Ok(None)
}

fn run_sweep(cfg: &RunConfig, arts: &mut Artifacts) -> Result<i32, CliError> {
    let names: Vec<String> = cfg.sweep.axes.iter().map(|a| a.parameter.clone()).collect();
    let grid = sweep_grid(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| grid.par_iter().map(|p| sweep_row(cfg, &names, p)).collect());
    let mut text = SweepRow::header(&names);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.to_csv());
        text.push('\n');
    }
    arts.write(SWEEP_FILE, &text)?;
    arts.note(format!("sweep: {} rows", rows.len()));
    let code = if rows.iter().any(|r| r.status.starts_with("hypotheses-failed")) {
        EXIT_HYPOTHESIS
    } else if rows.iter().all(|r| r.status == "ok") {
        EXIT_OK
    } else {
        EXIT_NONCONVERGED
    };
    Ok(code)
}

fn read_start(f: &Functional<f64>, path: &Path) -> Result<kirchhoff_core::MeshFunctionF64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(field_from_text(f.mesh().clone(), &text)?)
}

fn run_fiber(cfg: &RunConfig, arts: &mut Artifacts) -> Result<i32, CliError> {
    let f = match gated_functional(cfg, arts)? {
        Ok(f) => f,
        Err(code) => return Ok(code),
    };
    let start = match &cfg.fiber.start {
        Some(path) => read_start(&f, path)?,
        None => nodal_start(f.mesh(), cfg.seed),
    };
    let pair = project_to_m(&f, &start, &cfg.projection_options())?;
    let rep = fiber_max_check(&f, &start, &pair, cfg.fiber.grid)?;
    arts.write(FIBER_FILE, &rep.sample.to_text())?;
    let ok = rep.max_at_pair && rep.boundary_below && rep.shell_negative;
    let mut s = String::new();
    let kv: [(&str, String); 13] = [
        ("seed", cfg.seed.to_string()),
        ("alpha", pair.alpha.to_string()),
        ("beta", pair.beta.to_string()),
        ("eta1", pair.bracket.eta1.to_string()),
        ("eta2", pair.bracket.eta2.to_string()),
        ("pair_value", rep.pair_value.to_string()),
        ("max_value", rep.max_value.to_string()),
        ("max_at_pair", verdict(rep.max_at_pair).into()),
        ("boundary_max", rep.boundary_max.to_string()),
        ("boundary_below", verdict(rep.boundary_below).into()),
        ("shell_radius", rep.shell_radius.to_string()),
        ("shell_max", rep.shell_max.to_string()),
        ("shell_negative", verdict(rep.shell_negative).into()),
    ];
    for (k, v) in kv {
        let _ = writeln!(s, "{k}={v}");
    }
    arts.write(FIBER_SUMMARY_FILE, &s)?;
    arts.note(format!("fiber: (alpha, beta) = ({}, {}), max at pair: {}", pair.alpha, pair.beta, rep.max_at_pair));
    Ok(if ok { EXIT_OK } else { EXIT_NONCONVERGED })
}
