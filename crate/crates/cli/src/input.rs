//! Problem ingestion: matrix source, shift lists and right-hand sides.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use shiftsolve::{generate_cdr3d, read_matrix_market_file, Cdr3dSpec, Complex64, MarketMatrix, SparseMatrix};

use crate::args::ProblemArgs;
use crate::CliError;

/// Everything read from disk or generated, before picking a field.
pub struct Inputs {
    pub matrix: MarketMatrix,
    pub shifts: Vec<Complex64>,
    /// `None` means all ones.
    pub rhs: Option<Vec<Complex64>>,
}

impl Inputs {
    pub fn is_complex(&self) -> bool {
        matches!(self.matrix, MarketMatrix::Complex(_))
            || self.shifts.iter().any(|s| s.im != 0.0)
            || self.rhs.iter().flatten().any(|v| v.im != 0.0)
    }
}

pub fn parse_cdr3d(s: &str) -> Result<Cdr3dSpec, CliError> {
    let vals = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::config(format!("--gen-cdr3d: {e}")))?;
    match vals[..] {
        [h, eps, bx, by, bz, r] => Ok(Cdr3dSpec::new(h, eps, [bx, by, bz], r)),
        _ => Err(CliError::config(format!(
            "--gen-cdr3d expects 6 values H,EPS,BX,BY,BZ,R, got {}",
            vals.len()
        ))),
    }
}

pub fn parse_scalar(tok: &str) -> Result<Complex64, CliError> {
    let t = tok.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(Complex64::new(v, 0.0));
    }
    Complex64::from_str(t).map_err(|_| CliError::config(format!("cannot parse value `{t}`")))
}

/// Splits on commas and whitespace, dropping `#` comments.
pub fn parse_list(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(parse_scalar)
        .collect()
}

fn read_text(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {what} {}: {e}", path.display())))
}

fn negate(m: MarketMatrix) -> MarketMatrix {
    match m {
        MarketMatrix::Real(a) => MarketMatrix::Real(a.negated()),
        MarketMatrix::Complex(a) => MarketMatrix::Complex(a.negated()),
    }
}

pub fn load(p: &ProblemArgs) -> Result<Inputs, CliError> {
    let matrix = match (&p.matrix, &p.gen_cdr3d) {
        (Some(path), None) => read_matrix_market_file(path)
            .map_err(|e| CliError::config(format!("cannot read matrix {}: {e}", path.display())))?,
        (None, Some(spec)) => MarketMatrix::Real(generate_cdr3d(&parse_cdr3d(spec)?)?),
        _ => return Err(CliError::config("give exactly one of --matrix and --gen-cdr3d")),
    };
    let matrix = if p.negate { negate(matrix) } else { matrix };

    let shifts = match (&p.shifts, &p.shifts_file) {
        (Some(list), None) => parse_list(list)?,
        (None, Some(path)) => parse_list(&read_text(path, "shift file")?)?,
        _ => return Err(CliError::config("give exactly one of --shifts and --shifts-file")),
    };
    if shifts.is_empty() {
        return Err(CliError::config("shift list is empty"));
    }

    let rhs = if p.rhs == "ones" {
        None
    } else {
        let v = parse_list(&read_text(Path::new(&p.rhs), "right-hand side")?)?;
        if v.len() != matrix.dim() {
            return Err(CliError::config(format!(
                "right-hand side has {} entries, matrix dimension is {}",
                v.len(),
                matrix.dim()
            )));
        }
        Some(v)
    };
    Ok(Inputs { matrix, shifts, rhs })
}

/// Real view of the inputs; only valid when `!is_complex()`.
pub fn real_parts(inp: Inputs) -> (SparseMatrix<f64>, Vec<f64>, Vec<f64>) {
    let n = inp.matrix.dim();
    let a = match inp.matrix {
        MarketMatrix::Real(a) => a,
        MarketMatrix::Complex(_) => unreachable!("complex matrix in real run"),
    };
    let b = inp.rhs.map_or(vec![1.0; n], |v| v.iter().map(|c| c.re).collect());
    (a, b, inp.shifts.iter().map(|c| c.re).collect())
}

pub fn complex_parts(inp: Inputs) -> (SparseMatrix<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let n = inp.matrix.dim();
    let b = inp.rhs.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); n]);
    (inp.matrix.into_complex(), b, inp.shifts)
}
