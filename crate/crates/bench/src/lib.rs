//! Problem builders shared by the benchmarks.

use shiftsolve::{generate_cdr3d, Cdr3dSpec, SparseMatrix};

/// `−A` for the convection-dominated grid used in the benchmarks.
pub fn cdr3d_seed(h: f64) -> SparseMatrix<f64> {
    let s5 = 5f64.sqrt();
    generate_cdr3d(&Cdr3dSpec::new(h, 1.0, [0.0, 250.0 / s5, 500.0 / s5], 400.0))
        .expect("valid grid")
        .negated()
}

/// Evenly spaced real shifts in `[lo, hi]`.
pub fn shift_range(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}
