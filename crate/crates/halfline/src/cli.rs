//! Batch front-end for scripted experiments.
//!
//! One invocation reads a TOML run configuration, executes a single
//! command, writes a CSV table, and prints a human-readable summary on
//! standard output. Everything is deterministic: identical configurations
//! produce byte-identical tables.
//!
//! Exit codes: 0 on success, 1 when an iteration budget ran out, 2 for
//! invalid input of any kind. Every failure diagnostic names the violated
//! invariant.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::problem::{Constants, ForcingFn, HalfLineProblem, KernelPair, RegularityData};
use crate::solver::{gronwall_zeta, solve_system, GridSolution, DEFAULT_MAX_ITER};
use crate::system::{CaseTag, TruncatedSystem, CRITICAL_TAIL_THRESHOLD};
use crate::verify::catalog;
use crate::verify::{
    convergence_study, decay_check, truncation_study, ConvergenceTable, ManufacturedProblem,
    StudyPolicy, TruncationTable,
};
use crate::weights::Grid;

/// Tolerance applied when the configuration leaves `tol` out; the summary
/// notes the substitution.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Deterministic batch runner for half-line integral equation experiments.
#[derive(Debug, Parser)]
#[command(name = "halfline", version)]
pub struct Cli {
    /// Path to a TOML run configuration
    pub config: PathBuf,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match execute(&cli.config) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Unconverged(_) => 1,
                _ => 2,
            }
        }
    }
}

/// Reads, parses, and runs the configuration at `path`.
pub fn execute(path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    run(&parse_config(&text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Converge,
    Truncate,
    Verify,
    Catalog,
}

/// Where the problem instance comes from.
#[derive(Debug)]
pub enum ProblemSource {
    /// Identifier resolved against the built-in catalog.
    Catalog(String),
    /// Linear problem assembled from matrix coefficients in the
    /// configuration itself.
    Inline(HalfLineProblem),
}

/// Grid extents as given; each command enforces the subset it needs.
#[derive(Debug, Clone, Default)]
pub struct GridSpec {
    pub h: Option<f64>,
    pub n: Option<usize>,
    pub h_list: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
    pub window: Option<usize>,
}

/// A parsed and structurally checked run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub problem: Option<ProblemSource>,
    pub grid: GridSpec,
    pub tol: f64,
    /// Whether `tol` came from [`DEFAULT_TOL`] rather than the file.
    pub tol_defaulted: bool,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: String,
    problem: Option<RawProblem>,
    grid: Option<RawGrid>,
    tol: Option<f64>,
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    id: Option<String>,
    inline: Option<RawInline>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInline {
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    gamma: f64,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    x0_family: String,
    x0_params: Vec<f64>,
    #[serde(rename = "Lf")]
    lf: f64,
    #[serde(rename = "Lg")]
    lg: f64,
    #[serde(rename = "Cf")]
    cf: f64,
    #[serde(rename = "Cg")]
    cg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    h: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    h_list: Option<Vec<f64>>,
    #[serde(rename = "N_list")]
    n_list: Option<Vec<usize>>,
    window: Option<usize>,
}

/// Parses a TOML run configuration.
///
/// Structural checks happen here (value ranges, exactly one problem
/// source, closed-form forcing families); extent checks that depend on
/// the command happen in [`run`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| Error::Config(format!("cannot parse run configuration: {e}")))?;

    let command = match raw.command.to_ascii_lowercase().as_str() {
        "solve" => Command::Solve,
        "converge" => Command::Converge,
        "truncate" => Command::Truncate,
        "verify" => Command::Verify,
        "catalog" => Command::Catalog,
        other => {
            return Err(Error::Config(format!(
                "unknown command {other:?}; expected solve, converge, truncate, verify, or catalog"
            )))
        }
    };

    let tol = match raw.tol {
        None => DEFAULT_TOL,
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => {
            return Err(Error::Config(format!(
                "tol = {t} violates the tolerance invariant tol > 0"
            )))
        }
    };

    let problem = match raw.problem {
        None => None,
        Some(RawProblem {
            id: Some(id),
            inline: None,
        }) => Some(ProblemSource::Catalog(id)),
        Some(RawProblem {
            id: None,
            inline: Some(inline),
        }) => Some(ProblemSource::Inline(build_inline(inline)?)),
        Some(_) => {
            return Err(Error::Config(
                "problem needs exactly one source: problem.id or problem.inline".to_string(),
            ))
        }
    };

    let grid = match raw.grid {
        None => GridSpec::default(),
        Some(g) => {
            for h in g.h.iter().chain(g.h_list.iter().flatten()) {
                if !(h.is_finite() && *h > 0.0) {
                    return Err(Error::Config(format!(
                        "grid step h = {h} violates the grid invariant h > 0"
                    )));
                }
            }
            for n in g.n.iter().chain(g.n_list.iter().flatten()) {
                if *n == 0 {
                    return Err(Error::Config(
                        "grid length N = 0 violates the grid invariant N >= 1".to_string(),
                    ));
                }
            }
            if g.h_list.as_deref() == Some(&[]) || g.n_list.as_deref() == Some(&[]) {
                return Err(Error::Config(
                    "grid lists must not be empty".to_string(),
                ));
            }
            GridSpec {
                h: g.h,
                n: g.n,
                h_list: g.h_list,
                n_list: g.n_list,
                window: g.window,
            }
        }
    };

    Ok(RunConfig {
        command,
        problem,
        grid,
        tol,
        tol_defaulted: raw.tol.is_none(),
        output: raw.output,
    })
}

/// Largest absolute row sum, the sharp Lipschitz constant of `x -> M x`
/// in the max norm.
fn infinity_norm(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum())
        .fold(0.0_f64, f64::max)
}

fn build_inline(raw: RawInline) -> Result<HalfLineProblem> {
    let scalars = [
        ("alpha1", raw.alpha1),
        ("alpha2", raw.alpha2),
        ("beta", raw.beta),
        ("gamma", raw.gamma),
        ("Lf", raw.lf),
        ("Lg", raw.lg),
        ("Cf", raw.cf),
        ("Cg", raw.cg),
    ];
    for (name, v) in scalars {
        if !v.is_finite() {
            return Err(Error::Config(format!(
                "problem.inline.{name} = {v} must be finite"
            )));
        }
    }
    for v in raw.a.iter().chain(raw.b.iter()).flatten() {
        if !v.is_finite() {
            return Err(Error::Config(
                "kernel matrix entries must be finite".to_string(),
            ));
        }
    }
    // Declared Lipschitz constants must actually bound the linear maps.
    let norm_a = infinity_norm(&raw.a);
    let norm_b = infinity_norm(&raw.b);
    if raw.lf + 1e-12 < norm_a {
        return Err(Error::Config(format!(
            "Lf = {} is below the infinity norm {norm_a} of A, so it is not a Lipschitz constant for f",
            raw.lf
        )));
    }
    if raw.lg + 1e-12 < norm_b {
        return Err(Error::Config(format!(
            "Lg = {} is below the infinity norm {norm_b} of B, so it is not a Lipschitz constant for g",
            raw.lg
        )));
    }

    let dim = raw.a.len();
    let kernels = KernelPair::linear(raw.a, raw.b)?;
    let (x0, x0_sup) = build_forcing(dim, &raw.x0_family, &raw.x0_params)?;
    Ok(HalfLineProblem {
        dim,
        constants: Constants {
            alpha1: raw.alpha1,
            alpha2: raw.alpha2,
            beta: raw.beta,
            gamma: raw.gamma,
        },
        regularity: RegularityData {
            lf: raw.lf,
            lg: raw.lg,
            cf: raw.cf,
            cg: raw.cg,
            // linear kernels carry no explicit time dependence
            df: Some(0.0),
            dg: Some(0.0),
            ef: Some(0.0),
            eg: Some(0.0),
        },
        kernels,
        x0,
        x0_sup,
    })
}

/// Builds the forcing term from a named closed-form family together with
/// its exact sup norm over the half line.
///
/// Families for an `n`-dimensional problem:
/// `constant` with params `[c_1..c_n]`, `exp` with `[a_1..a_n, rate]`
/// giving `a_k e^{-rate t}`, and `offset_exp` with
/// `[c_1..c_n, a_1..a_n, rate]` giving `c_k + a_k e^{-rate t}`. Rates
/// must be nonnegative so the sup over `t >= 0` is finite.
fn build_forcing(dim: usize, family: &str, params: &[f64]) -> Result<(ForcingFn, f64)> {
    if params.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("x0_params must be finite".to_string()));
    }
    let expect = |want: usize| -> Result<()> {
        if params.len() == want {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "x0_family {family:?} with dim {dim} needs {want} parameters, got {}",
                params.len()
            )))
        }
    };
    let check_rate = |rate: f64| -> Result<f64> {
        if rate >= 0.0 {
            Ok(rate)
        } else {
            Err(Error::Config(format!(
                "x0 decay rate {rate} violates the boundedness invariant rate >= 0"
            )))
        }
    };
    match family {
        "constant" => {
            expect(dim)?;
            let c = params.to_vec();
            let sup = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let f: ForcingFn = Arc::new(move |_t| c.clone());
            Ok((f, sup))
        }
        "exp" => {
            expect(dim + 1)?;
            let rate = check_rate(params[dim])?;
            let a = params[..dim].to_vec();
            let sup = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let f: ForcingFn =
                Arc::new(move |t| a.iter().map(|v| v * (-rate * t).exp()).collect());
            Ok((f, sup))
        }
        "offset_exp" => {
            expect(2 * dim + 1)?;
            let rate = check_rate(params[2 * dim])?;
            let c = params[..dim].to_vec();
            let a = params[dim..2 * dim].to_vec();
            // each component moves monotonically from c + a to c
            let sup = c
                .iter()
                .zip(&a)
                .fold(0.0_f64, |m, (ck, ak)| m.max(ck.abs()).max((ck + ak).abs()));
            let f: ForcingFn = Arc::new(move |t| {
                let w = (-rate * t).exp();
                c.iter().zip(&a).map(|(ck, ak)| ck + ak * w).collect()
            });
            Ok((f, sup))
        }
        other => Err(Error::Config(format!(
            "unknown x0_family {other:?}; expected constant, exp, or offset_exp"
        ))),
    }
}

/// Executes one parsed configuration.
pub fn run(config: &RunConfig) -> Result<()> {
    match config.command {
        Command::Catalog => cmd_catalog(),
        Command::Solve => cmd_solve(config),
        Command::Converge => cmd_converge(config),
        Command::Truncate => cmd_truncate(config),
        Command::Verify => cmd_verify(config),
    }
}

struct ResolvedProblem {
    label: String,
    problem: HalfLineProblem,
    exact: Option<ForcingFn>,
}

fn resolve_problem(config: &RunConfig) -> Result<ResolvedProblem> {
    match &config.problem {
        None => Err(Error::Config(
            "this command needs a [problem] table with id or inline".to_string(),
        )),
        Some(ProblemSource::Catalog(id)) => {
            let e = catalog::entry(id)?;
            Ok(ResolvedProblem {
                label: e.id.to_string(),
                problem: e.problem,
                exact: e.exact,
            })
        }
        Some(ProblemSource::Inline(p)) => Ok(ResolvedProblem {
            label: "inline".to_string(),
            problem: p.clone(),
            exact: None,
        }),
    }
}

fn require_output(config: &RunConfig) -> Result<&Path> {
    config.output.as_deref().ok_or_else(|| {
        Error::Config("this command writes a table and needs an output path".to_string())
    })
}

fn case_of(p: &HalfLineProblem) -> CaseTag {
    if p.constants.beta - p.constants.gamma <= CRITICAL_TAIL_THRESHOLD {
        CaseTag::TailCritical
    } else {
        CaseTag::TailDecaying
    }
}

fn print_header(command: &str, rp: &ResolvedProblem, config: &RunConfig) {
    println!("command: {command}");
    println!("problem: {} (dim {})", rp.label, rp.problem.dim);
    if config.tol_defaulted {
        println!("tol: {:e} (default applied)", config.tol);
    } else {
        println!("tol: {:e}", config.tol);
    }
}

fn print_case_lines(system: &TruncatedSystem) {
    println!("case: {}", system.case().as_str());
    println!("q: {}", system.problem().contraction());
    if let Some(dp) = system.delta_params() {
        println!("delta: {}", dp.delta);
        println!("theta: {}", dp.theta);
    }
}

/// Case summary for study commands, where delta is selected per grid.
/// The representative system is assembled only in the critical case,
/// where forcing terms are closed-form and assembly is cheap.
fn print_study_case(problem: &HalfLineProblem, representative: Grid) -> Result<()> {
    let case = case_of(problem);
    println!("case: {}", case.as_str());
    println!("q: {}", problem.contraction());
    if case == CaseTag::TailCritical {
        let system = TruncatedSystem::assemble(problem, representative)?;
        if let Some(dp) = system.delta_params() {
            println!(
                "delta: {} (on the N = {} grid; chosen per level)",
                dp.delta,
                representative.last_index()
            );
            println!("theta: {}", dp.theta);
        }
    }
    Ok(())
}

/// Fixed-width scientific notation with 17 significant digits, enough to
/// round-trip any f64 and independent of locale.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Quotes a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_table(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)?;
    Ok(())
}

fn solution_csv(sol: &GridSolution) -> String {
    let dim = sol.values.dim();
    let mut out = String::from("i,t");
    for k in 0..dim {
        let _ = write!(out, ",x_{k}");
    }
    out.push('\n');
    for i in 0..sol.values.nodes() {
        let _ = write!(out, "{i},{}", fmt(sol.time(i)));
        for v in sol.value(i) {
            let _ = write!(out, ",{}", fmt(*v));
        }
        out.push('\n');
    }
    out
}

fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("h,error,order\n");
    for row in &table.rows {
        let order = row.order.map(fmt).unwrap_or_default();
        let _ = writeln!(out, "{},{},{order}", fmt(row.h), fmt(row.error));
    }
    out
}

fn truncation_csv(table: &TruncationTable) -> String {
    let mut out = String::from("N,error\n");
    for row in &table.rows {
        let _ = writeln!(out, "{},{}", row.n, fmt(row.error));
    }
    out
}

fn cmd_catalog() -> Result<()> {
    println!("command: catalog");
    for id in catalog::ids() {
        let e = catalog::entry(id)?;
        println!(
            "{}: dim {}, q = {}, {}, {}",
            e.id,
            e.problem.dim,
            e.problem.contraction(),
            case_of(&e.problem).as_str(),
            e.summary
        );
    }
    Ok(())
}

fn cmd_solve(config: &RunConfig) -> Result<()> {
    let rp = resolve_problem(config)?;
    let (h, n) = match (config.grid.h, config.grid.n) {
        (Some(h), Some(n)) => (h, n),
        _ => {
            return Err(Error::Config(
                "solve needs grid.h and grid.N".to_string(),
            ))
        }
    };
    let out_path = require_output(config)?;
    let grid = Grid::new(h, n)?;
    let system = TruncatedSystem::assemble(&rp.problem, grid)?;
    let sol = solve_system(&system, config.tol, DEFAULT_MAX_ITER)?;
    write_table(out_path, &solution_csv(&sol))?;

    print_header("solve", &rp, config);
    println!("grid: h = {h}, N = {n} ({} nodes)", grid.nodes());
    print_case_lines(&system);
    let r = &sol.report;
    let status = if r.converged {
        "converged"
    } else {
        "iteration budget exhausted"
    };
    println!("iterations: {} ({status})", r.iterations);
    println!("last step: {:e}", r.last_step);
    println!("certified bound: {:e}", r.certified_bound);
    println!("dropped tail bound: {:e}", r.dropped_tail_sup);
    println!("wrote: {}", out_path.display());
    if !r.converged {
        return Err(Error::Unconverged(format!(
            "stopped after {} iterations with step {:e}; certified bound {:e} exceeds tol {:e}",
            r.iterations, r.last_step, r.certified_bound, config.tol
        )));
    }
    Ok(())
}

fn cmd_converge(config: &RunConfig) -> Result<()> {
    let rp = resolve_problem(config)?;
    let exact = rp.exact.clone().ok_or_else(|| {
        Error::RejectedInput(format!(
            "refinement study needs a problem with a reference solution; available: {}",
            "p1, p1-crit, p2"
        ))
    })?;
    let h_list = config.grid.h_list.as_deref().ok_or_else(|| {
        Error::Config("converge needs grid.h_list".to_string())
    })?;
    let out_path = require_output(config)?;

    // window is given in nodes of the coarsest grid; every finer grid
    // covers the same time interval
    let policy = match config.grid.window {
        None => StudyPolicy::default(),
        Some(w) => {
            let window = w as f64 * h_list[0];
            StudyPolicy {
                horizon: (3.0 * window).max(StudyPolicy::default().horizon),
                window,
            }
        }
    };

    let mp = ManufacturedProblem {
        problem: rp.problem.clone(),
        exact,
    };
    let table = convergence_study(&mp, h_list, config.tol, &policy)?;
    write_table(out_path, &convergence_csv(&table))?;

    print_header("converge", &rp, config);
    println!(
        "extents: horizon t <= {}, error window t <= {}",
        policy.horizon, policy.window
    );
    let representative = Grid::new(h_list[0], ((policy.horizon / h_list[0]).ceil() as usize).max(1))?;
    print_study_case(&rp.problem, representative)?;
    for row in &table.rows {
        let order = row
            .order
            .map(|o| format!("{o:.3}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "h = {}: error = {:e}, order = {order}, tail bound = {:e}, iterations = {}",
            row.h, row.error, row.tail_bound, row.iterations
        );
    }
    println!(
        "certified bound per level: <= {:e} by the stopping rule",
        config.tol
    );
    println!("wrote: {}", out_path.display());
    Ok(())
}

fn cmd_truncate(config: &RunConfig) -> Result<()> {
    let rp = resolve_problem(config)?;
    let h = config
        .grid
        .h
        .ok_or_else(|| Error::Config("truncate needs grid.h".to_string()))?;
    let n_list = config.grid.n_list.as_deref().ok_or_else(|| {
        Error::Config("truncate needs grid.N_list".to_string())
    })?;
    let out_path = require_output(config)?;
    let window = config.grid.window.unwrap_or(n_list[0]);

    let table = truncation_study(&rp.problem, h, n_list, window, config.tol)?;
    write_table(out_path, &truncation_csv(&table))?;

    print_header("truncate", &rp, config);
    if config.grid.window.is_none() {
        println!("window: nodes 0..={window} (default: shortest grid)");
    } else {
        println!("window: nodes 0..={window}");
    }
    print_study_case(&rp.problem, Grid::new(h, n_list[0])?)?;
    let n_ref = 4 * n_list[n_list.len() - 1];
    println!(
        "reference: N = {n_ref}, iterations = {}",
        table.reference_iterations
    );
    for row in &table.rows {
        println!(
            "N = {}: error = {:e}, iterations = {}",
            row.n, row.error, row.iterations
        );
    }
    println!(
        "certified bound per solve: <= {:e} by the stopping rule",
        config.tol
    );
    println!("wrote: {}", out_path.display());
    Ok(())
}

fn cmd_verify(config: &RunConfig) -> Result<()> {
    let rp = resolve_problem(config)?;
    let out_path = require_output(config)?;
    let report = rp.problem.validate();

    let mut rows: Vec<[String; 4]> = Vec::new();
    for check in &report.checks {
        rows.push([
            "validation".to_string(),
            check.name.to_string(),
            if check.passed { "pass" } else { "fail" }.to_string(),
            check.detail.clone(),
        ]);
    }
    let mut failures = report.failures();

    let grid = match (config.grid.h, config.grid.n) {
        (Some(h), Some(n)) => Some(Grid::new(h, n)?),
        (None, None) => None,
        _ => {
            return Err(Error::Config(
                "verify takes grid.h and grid.N together or not at all".to_string(),
            ))
        }
    };

    if report.passed() {
        if let Some(grid) = grid {
            analysis_rows(&rp.problem, grid, config.tol, &mut rows, &mut failures);
        }
    }

    let mut csv = String::from("check,name,status,detail\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            csv_field(&row[0]),
            csv_field(&row[1]),
            csv_field(&row[2]),
            csv_field(&row[3])
        );
    }
    write_table(out_path, &csv)?;

    print_header("verify", &rp, config);
    println!("q: {}", report.q);
    println!("safe radius: {}", report.safe_radius);
    println!(
        "checks: {} recorded, {} failed",
        rows.len(),
        failures.len()
    );
    println!("wrote: {}", out_path.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidProblem { failures })
    }
}

/// Appends system-level diagnostic rows for a validated problem: case
/// classification, contraction data, the comparison-sequence range, and
/// the decay bound. Analysis failures are recorded as rows, never
/// panics, so the table is always written.
fn analysis_rows(
    problem: &HalfLineProblem,
    grid: Grid,
    tol: f64,
    rows: &mut Vec<[String; 4]>,
    failures: &mut Vec<String>,
) {
    let mut push = |category: &str, name: &str, ok: bool, detail: String| {
        rows.push([
            category.to_string(),
            name.to_string(),
            if ok { "pass" } else { "fail" }.to_string(),
            detail,
        ]);
    };

    let system = match TruncatedSystem::assemble(problem, grid) {
        Ok(s) => s,
        Err(e) => {
            push("analysis", "assembly", false, e.to_string());
            failures.push(format!("assembly: {e}"));
            return;
        }
    };

    push(
        "analysis",
        "case",
        true,
        system.case().as_str().to_string(),
    );
    push(
        "analysis",
        "contraction",
        true,
        format!("q = {}", problem.contraction()),
    );
    if let Some(dp) = system.delta_params() {
        push("analysis", "delta", true, format!("delta = {}", dp.delta));
        push(
            "analysis",
            "theta",
            true,
            format!("theta = {} < 1", dp.theta),
        );
    }
    push(
        "analysis",
        "dropped_tail",
        true,
        format!("sup bound {:e}", system.dropped_tail_sup()),
    );

    let q = problem.contraction();
    match gronwall_zeta(&system) {
        Ok(zeta) => {
            let lo = zeta.iter().fold(f64::INFINITY, |m, v| m.min(*v));
            let hi = zeta.iter().fold(0.0_f64, |m, v| m.max(*v));
            let cap = 1.0 / (1.0 - q);
            let ok = lo >= 1.0 - 1e-9 && hi <= cap + 1e-8;
            let detail =
                format!("range [{lo}, {hi}] against [1, {cap}]");
            push("analysis", "comparison_sequence", ok, detail.clone());
            if !ok {
                failures.push(format!("comparison_sequence: {detail}"));
            }
        }
        Err(e) => {
            push("analysis", "comparison_sequence", false, e.to_string());
            failures.push(format!("comparison_sequence: {e}"));
        }
    }

    match decay_check(problem, grid, tol) {
        Ok(report) if !report.applicable => {
            rows.push([
                "analysis".to_string(),
                "decay_bound".to_string(),
                "skip".to_string(),
                format!("not applicable: {}", report.reasons.join("; ")),
            ]);
        }
        Ok(report) => {
            let detail = format!(
                "max violation {:e}; tail sups {}",
                report.max_violation,
                report
                    .tail_sups
                    .iter()
                    .map(|(t, s)| format!("t >= {t}: {s:e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            push("analysis", "decay_bound", report.bound_holds, detail.clone());
            if !report.bound_holds {
                failures.push(format!("decay_bound: {detail}"));
            }
        }
        Err(e) => {
            push("analysis", "decay_bound", false, e.to_string());
            failures.push(format!("decay_bound: {e}"));
        }
    }
}
