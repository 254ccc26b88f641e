//! Command-line harness around the `shiftsolve` solvers: loads or generates
//! a problem, dispatches one solver id and writes JSON reports and CSV
//! residual histories.

pub mod args;
pub mod input;
pub mod report;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use shiftsolve::seed::{cmrh, gmres, SolverConfig};
use shiftsolve::{
    nested_solve, shifted_cmrh, shifted_gmres, InnerMethod, MultiShiftReport, OuterMethod, Scalar, SeedPolicy,
    Shifted, ShiftedProblem, SparseMatrix,
};

pub use args::{Cli, Command, CompareArgs, ProblemArgs, RunArgs, SeedArg, SolverId};
use report::{ConfigEcho, GlobalCounts, HistoryRow, RunReport, ShiftEntry, ShiftValue};

/// Exit status of a finished run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    AllConverged,
    Partial,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::AllConverged => 0,
            Status::Partial => 2,
        }
    }
}

#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<shiftsolve::Error> for CliError {
    fn from(e: shiftsolve::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

/// A solved run: the report plus its history rows.
pub struct RunOutput {
    pub report: RunReport,
    pub history: Vec<HistoryRow>,
}

impl RunOutput {
    pub fn status(&self) -> Status {
        if self.report.per_shift.iter().all(|s| s.converged) {
            Status::AllConverged
        } else {
            Status::Partial
        }
    }
}

fn solver_config(p: &ProblemArgs, nested: bool) -> SolverConfig {
    let restart = if nested { p.outer_max.unwrap_or(p.restart) } else { p.restart };
    SolverConfig {
        restart,
        tol: p.tol,
        max_mvps: p.max_mvps.max(restart as u64),
        ..SolverConfig::default()
    }
}

fn echo(p: &ProblemArgs, solver: SolverId, shifts: &[ShiftValue]) -> ConfigEcho {
    ConfigEcho {
        matrix: p.matrix.as_ref().map(|m| m.display().to_string()),
        gen_cdr3d: p.gen_cdr3d.clone(),
        negate: p.negate,
        shifts: shifts.to_vec(),
        seed: p.seed,
        solver,
        restart: p.restart,
        tol: p.tol,
        max_mvps: p.max_mvps,
        inner_it: p.inner_it,
        outer_max: p.outer_max,
        rhs: p.rhs.clone(),
    }
}

fn solve_typed<T: Scalar>(
    a: SparseMatrix<T>,
    b: Vec<T>,
    shifts: Vec<T>,
    p: &ProblemArgs,
    solver: SolverId,
) -> Result<RunOutput, CliError> {
    let n = a.dim();
    let nnz = a.nnz();
    let shift_values: Vec<ShiftValue> = shifts.iter().map(|s| ShiftValue { re: s.re(), im: s.im() }).collect();
    let seed = match p.seed {
        SeedArg::First => SeedPolicy::Shift(0),
        SeedArg::Zero => SeedPolicy::Zero,
    };
    let cfg = solver_config(p, solver.is_nested());
    cfg.validate()?;
    let started = Instant::now();

    let mut per_shift = Vec::new();
    let mut history = Vec::new();
    let mut global = GlobalCounts::default();
    match solver {
        SolverId::Cmrh | SolverId::Gmres => {
            // one independent solve per shift
            let x0 = vec![T::zero(); n];
            for (i, &s) in shifts.iter().enumerate() {
                let op = Shifted::new(&a, s);
                let rep = if solver == SolverId::Cmrh {
                    cmrh(&op, &b, &x0, &cfg)?
                } else {
                    gmres(&op, &b, &x0, &cfg)?
                };
                let offset = global.mvps;
                for h in &rep.residual_history {
                    history.push(HistoryRow {
                        mvps: offset + h.mvps,
                        shift_index: i,
                        relative_residual: h.relative_residual,
                    });
                }
                let mut r = vec![T::zero(); n];
                shiftsolve::LinearOperator::apply(&op, &rep.solution, &mut r);
                let res: Vec<T> = b.iter().zip(&r).map(|(&bi, &ri)| bi - ri).collect();
                global.mvps += rep.mvps;
                global.residual_check_mvps += rep.residual_check_mvps + 1;
                per_shift.push(ShiftEntry {
                    shift: shift_values[i],
                    converged: rep.converged,
                    cycles_or_outer_steps: rep.cycles,
                    final_true_relative_residual: shiftsolve::vector::norm2(&res) / shiftsolve::vector::norm2(&b),
                });
            }
        }
        _ => {
            let problem = ShiftedProblem::new(a, b, shifts, seed)?;
            let rep: MultiShiftReport<T> = match solver {
                SolverId::Scmrh => shifted_cmrh(&problem, &cfg)?,
                SolverId::Sgmres => shifted_gmres(&problem, &cfg)?,
                SolverId::HessenFcmrh => nested_solve(&problem, OuterMethod::Fcmrh, InnerMethod::Hessen, p.inner_it, &cfg)?,
                SolverId::HessenFgmres => nested_solve(&problem, OuterMethod::Fgmres, InnerMethod::Hessen, p.inner_it, &cfg)?,
                SolverId::FomFcmrh => nested_solve(&problem, OuterMethod::Fcmrh, InnerMethod::Fom, p.inner_it, &cfg)?,
                SolverId::FomFgmres => nested_solve(&problem, OuterMethod::Fgmres, InnerMethod::Fom, p.inner_it, &cfg)?,
                SolverId::Cmrh | SolverId::Gmres => unreachable!(),
            };
            for (i, s) in rep.shifts.iter().enumerate() {
                for h in &s.residual_history {
                    history.push(HistoryRow {
                        mvps: h.mvps,
                        shift_index: i,
                        relative_residual: h.relative_residual,
                    });
                }
                per_shift.push(ShiftEntry {
                    shift: shift_values[i],
                    converged: s.converged(),
                    cycles_or_outer_steps: s.converged_at.unwrap_or(rep.cycles),
                    final_true_relative_residual: s.final_true_residual,
                });
            }
            global.mvps = rep.mvps;
            global.inner_mvps = rep.inner_mvps;
            global.residual_check_mvps = rep.residual_check_mvps;
        }
    }
    global.wall_seconds = started.elapsed().as_secs_f64();
    Ok(RunOutput {
        report: RunReport {
            solver: solver.name().to_string(),
            config: echo(p, solver, &shift_values),
            n,
            nnz,
            per_shift,
            global,
        },
        history,
    })
}

/// Loads the problem and runs one solver without writing any file.
pub fn solve(p: &ProblemArgs, solver: SolverId) -> Result<RunOutput, CliError> {
    let inp = input::load(p)?;
    if inp.is_complex() {
        let (a, b, s) = input::complex_parts(inp);
        solve_typed(a, b, s, p, solver)
    } else {
        let (a, b, s) = input::real_parts(inp);
        solve_typed(a, b, s, p, solver)
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

/// `shiftsolve run`.
pub fn run(args: &RunArgs) -> Result<Status, CliError> {
    let out = solve(&args.problem, args.solver)?;
    let json = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::config(e.to_string()))?;
    match &args.report {
        Some(path) => write_file(path, &json)?,
        None => writeln!(std::io::stdout(), "{json}")?,
    }
    if let Some(path) = &args.history {
        write_file(path, &report::history_csv(&out.history))?;
    }
    Ok(out.status())
}

/// `shiftsolve compare`: one CSV row per solver.
pub fn compare(args: &CompareArgs) -> Result<Status, CliError> {
    let table = compare_table(&args.problem, &args.solvers)?;
    let mut text = String::from(report::COMPARE_HEADER);
    text.push('\n');
    let mut status = Status::AllConverged;
    for out in &table {
        text.push_str(&report::compare_row(&out.report));
        text.push('\n');
        if out.status() == Status::Partial {
            status = Status::Partial;
        }
    }
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(status)
}

pub fn compare_table(p: &ProblemArgs, solvers: &[SolverId]) -> Result<Vec<RunOutput>, CliError> {
    if solvers.is_empty() {
        return Err(CliError::config("no solvers given to compare"));
    }
    solvers.iter().map(|&s| solve(p, s)).collect()
}
