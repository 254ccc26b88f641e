//! Matrix Market coordinate-format reader, plus a plain writer used for
//! debugging and round-trip tests.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::sparse::SparseMatrix;

/// A matrix read from disk, tagged by its field.
#[derive(Clone, Debug, PartialEq)]
pub enum MarketMatrix {
    Real(SparseMatrix<f64>),
    Complex(SparseMatrix<Complex64>),
}

impl MarketMatrix {
    pub fn dim(&self) -> usize {
        match self {
            MarketMatrix::Real(a) => a.dim(),
            MarketMatrix::Complex(a) => a.dim(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            MarketMatrix::Real(a) => a.nnz(),
            MarketMatrix::Complex(a) => a.nnz(),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            MarketMatrix::Real(_) => Field::Real,
            MarketMatrix::Complex(_) => Field::Complex,
        }
    }

    /// Promotes to complex storage (no-op for complex data).
    pub fn into_complex(self) -> SparseMatrix<Complex64> {
        match self {
            MarketMatrix::Real(a) => a.to_complex(),
            MarketMatrix::Complex(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn mm_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::MatrixMarket(format!("line {line}: {msg}"))
}

/// Reads a coordinate-format Matrix Market stream.
///
/// Supported qualifiers: `real`, `integer`, `complex` with `general`,
/// `symmetric`, `hermitian` or `skew-symmetric`. Symmetric variants are
/// expanded to full storage and duplicate entries are summed.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<MarketMatrix> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::MatrixMarket("empty input".into()))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(mm_err(1, "header must start with %%MatrixMarket"));
    }
    if tokens.len() != 5 {
        return Err(mm_err(1, "header must have the form `%%MatrixMarket matrix coordinate <field> <symmetry>`"));
    }
    if tokens[1] != "matrix" {
        return Err(mm_err(1, format!("unsupported object `{}`", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Unsupported(format!("{} format (only coordinate)", tokens[2])));
    }
    let complex = match tokens[3].as_str() {
        "real" | "integer" | "double" => false,
        "complex" => true,
        "pattern" => return Err(Error::Unsupported("pattern matrices".into())),
        other => return Err(mm_err(1, format!("unknown field `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(mm_err(1, format!("unknown symmetry `{other}`"))),
    };

    // size line
    let mut size: Option<(usize, usize)> = None;
    for (no, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 {
            return Err(mm_err(no + 1, "size line must hold `rows cols nnz`"));
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|_| mm_err(no + 1, format!("bad integer `{s}`")));
        let (rows, cols, nnz) = (parse(f[0])?, parse(f[1])?, parse(f[2])?);
        if rows != cols {
            return Err(mm_err(no + 1, format!("matrix is not square ({rows}x{cols})")));
        }
        size = Some((rows, nnz));
        break;
    }
    let (n, nnz) = size.ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;

    let mut trips: Vec<(usize, usize, Complex64)> = Vec::with_capacity(nnz * 2);
    let mut seen = 0usize;
    for (no, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        seen += 1;
        if seen > nnz {
            return Err(mm_err(no + 1, format!("more entries than the declared {nnz}")));
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let want = if complex { 4 } else { 3 };
        if f.len() != want {
            return Err(mm_err(no + 1, format!("expected {want} fields, found {}", f.len())));
        }
        let idx = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| mm_err(no + 1, format!("bad index `{s}`")))?;
            if v == 0 || v > n {
                return Err(mm_err(no + 1, format!("index {v} out of range 1..={n}")));
            }
            Ok(v - 1)
        };
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| mm_err(no + 1, format!("bad value `{s}`"))) };
        let (i, j) = (idx(f[0])?, idx(f[1])?);
        let v = if complex {
            Complex64::new(num(f[2])?, num(f[3])?)
        } else {
            Complex64::new(num(f[2])?, 0.0)
        };
        trips.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => trips.push((j, i, v)),
                Symmetry::Hermitian => trips.push((j, i, v.conj())),
                Symmetry::Skew => trips.push((j, i, -v)),
            }
        } else if symmetry == Symmetry::Skew {
            return Err(mm_err(no + 1, "skew-symmetric matrix with a diagonal entry"));
        }
    }
    if seen != nnz {
        return Err(Error::MatrixMarket(format!(
            "declared {nnz} entries but found {seen}"
        )));
    }

    if complex {
        Ok(MarketMatrix::Complex(SparseMatrix::from_triplets(n, trips)?))
    } else {
        Ok(MarketMatrix::Real(SparseMatrix::from_triplets(
            n,
            trips.into_iter().map(|(i, j, v)| (i, j, v.re)),
        )?))
    }
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<MarketMatrix> {
    let f = File::open(path.as_ref())?;
    read_matrix_market(BufReader::new(f))
}

/// Writes `general` coordinate format with round-trip float formatting.
pub fn write_matrix_market<T: Scalar, W: Write>(a: &SparseMatrix<T>, mut w: W) -> Result<()> {
    let field = match T::FIELD {
        Field::Real => "real",
        Field::Complex => "complex",
    };
    writeln!(w, "%%MatrixMarket matrix coordinate {field} general")?;
    writeln!(w, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
    for (i, j, v) in a.iter() {
        match T::FIELD {
            Field::Real => writeln!(w, "{} {} {:e}", i + 1, j + 1, v.re())?,
            Field::Complex => writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, v.re(), v.im())?,
        }
    }
    Ok(())
}
