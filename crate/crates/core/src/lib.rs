//! Krylov solvers for sequences of shifted sparse linear systems
//! `(A − σ_i I) x = b`, built on the pivoted Hessenberg process (CMRH
//! family) with Arnoldi-based GMRES/FOM counterparts for comparison.

pub mod cdr3d;
pub mod dense;
pub mod error;
pub mod krylov;
pub mod market;
pub mod nested;
pub mod scalar;
pub mod seed;
pub mod shifted;
pub mod sparse;
pub mod vector;

pub use cdr3d::{generate_cdr3d, Cdr3dSpec};
pub use dense::HessenbergMatrix;
pub use error::{Error, Result};
pub use krylov::{BasisKind, KrylovBasis};
pub use market::{read_matrix_market, read_matrix_market_file, write_matrix_market, MarketMatrix};
pub use num_complex::Complex64;
pub use nested::{nested_solve, InnerMethod, OuterMethod};
pub use scalar::{Field, Scalar};
pub use seed::{cmrh, gmres, FlopCounters, HistoryPoint, SolveReport, SolverConfig};
pub use sparse::{Counted, LinearOperator, Shifted, SparseMatrix};
pub use shifted::{
    inner_shifted_fom, inner_shifted_hessenberg, shifted_cmrh, shifted_gmres, InnerSolve, MultiShiftReport,
    SeedPolicy, ShiftResult, ShiftStatus, ShiftedProblem,
};
