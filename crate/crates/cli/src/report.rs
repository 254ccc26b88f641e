use serde::Serialize;

use crate::args::{SeedArg, SolverId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub matrix: Option<String>,
    pub gen_cdr3d: Option<String>,
    pub negate: bool,
    pub shifts: Vec<ShiftValue>,
    pub seed: SeedArg,
    pub solver: SolverId,
    pub restart: usize,
    pub tol: f64,
    pub max_mvps: u64,
    pub inner_it: usize,
    pub outer_max: Option<usize>,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftEntry {
    pub shift: ShiftValue,
    pub converged: bool,
    pub cycles_or_outer_steps: usize,
    pub final_true_relative_residual: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GlobalCounts {
    pub mvps: u64,
    pub inner_mvps: u64,
    pub residual_check_mvps: u64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub solver: String,
    pub config: ConfigEcho,
    pub n: usize,
    pub nnz: usize,
    pub per_shift: Vec<ShiftEntry>,
    pub global: GlobalCounts,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryRow {
    pub mvps: u64,
    pub shift_index: usize,
    pub relative_residual: f64,
}

pub fn history_csv(rows: &[HistoryRow]) -> String {
    let mut s = String::from("mvps,shift_index,relative_residual\n");
    for r in rows {
        s.push_str(&format!("{},{},{:e}\n", r.mvps, r.shift_index, r.relative_residual));
    }
    s
}

pub const COMPARE_HEADER: &str =
    "solver,n,nnz,shifts,converged,mvps,inner_mvps,residual_check_mvps,max_true_relative_residual,cpu_seconds";

pub fn compare_row(r: &RunReport) -> String {
    let conv = r.per_shift.iter().filter(|s| s.converged).count();
    let worst = r
        .per_shift
        .iter()
        .map(|s| s.final_true_relative_residual)
        .fold(0.0, f64::max);
    format!(
        "{},{},{},{},{},{},{},{},{:e},{:.3}",
        r.solver,
        r.n,
        r.nnz,
        r.per_shift.len(),
        conv,
        r.global.mvps,
        r.global.inner_mvps,
        r.global.residual_check_mvps,
        worst,
        r.global.wall_seconds
    )
}
