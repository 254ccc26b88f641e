//! Finite-difference discretization of the 3D convection-diffusion-reaction
//! operator `ε∆u − β·∇u + r·u` on the unit cube with homogeneous Dirichlet
//! boundary conditions.
//!
//! Seven-point centered stencil, natural ordering (x fastest, then y, then
//! z). The produced matrix is the `A` of `du/dt = A u`; solve with
//! [`SparseMatrix::negated`] when the seed operator is `−A`.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cdr3dSpec {
    /// Grid spacing; `1/h` must be an integer ≥ 2.
    pub h: f64,
    /// Diffusion coefficient ε.
    pub eps: f64,
    /// Convection vector β.
    pub beta: [f64; 3],
    /// Reaction coefficient r.
    pub react: f64,
}

impl Cdr3dSpec {
    pub fn new(h: f64, eps: f64, beta: [f64; 3], react: f64) -> Self {
        Cdr3dSpec { h, eps, beta, react }
    }

    /// Interior points per axis, `1/h − 1`.
    pub fn points_per_axis(&self) -> Result<usize> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Generator(format!("grid spacing must be positive, got {}", self.h)));
        }
        let inv = 1.0 / self.h;
        let k = inv.round();
        if (inv - k).abs() > 1e-8 * inv.max(1.0) {
            return Err(Error::Generator(format!("1/h = {inv} is not an integer")));
        }
        if k < 2.0 {
            return Err(Error::Generator(format!("1/h = {k} leaves no interior points")));
        }
        Ok(k as usize - 1)
    }

    pub fn dimension(&self) -> Result<usize> {
        let n = self.points_per_axis()?;
        Ok(n * n * n)
    }
}

/// Assembles the stencil matrix of dimension `N³`, `N = 1/h − 1`.
pub fn generate_cdr3d(spec: &Cdr3dSpec) -> Result<SparseMatrix<f64>> {
    let n = spec.points_per_axis()?;
    let h = spec.h;
    let diff = spec.eps / (h * h);
    let diag = -6.0 * diff + spec.react;
    // per axis: (backward, forward) neighbor coefficients
    let coef: [(f64, f64); 3] = std::array::from_fn(|k| {
        let c = spec.beta[k] / (2.0 * h);
        (diff + c, diff - c)
    });

    let dim = n * n * n;
    let stride = [1, n, n * n];
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut col_idx = Vec::with_capacity(7 * dim);
    let mut values = Vec::with_capacity(7 * dim);
    row_ptr.push(0);

    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let row = ix + n * iy + n * n * iz;
                let pos = [ix, iy, iz];
                // ascending column order: -z, -y, -x, diag, +x, +y, +z
                let mut push = |col: usize, v: f64| {
                    if v != 0.0 {
                        col_idx.push(col);
                        values.push(v);
                    }
                };
                for k in (0..3).rev() {
                    if pos[k] > 0 {
                        push(row - stride[k], coef[k].0);
                    }
                }
                push(row, diag);
                for k in 0..3 {
                    if pos[k] + 1 < n {
                        push(row + stride[k], coef[k].1);
                    }
                }
                row_ptr.push(values.len());
            }
        }
    }
    SparseMatrix::from_csr(dim, row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interior_point() {
        let a = generate_cdr3d(&Cdr3dSpec::new(0.5, 1.0, [10.0, 20.0, 30.0], 400.0)).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.to_dense(), vec![vec![376.0]]);
    }

    #[test]
    fn reference_grid_dimensions() {
        assert_eq!(Cdr3dSpec::new(0.025, 1.0, [0.0; 3], 0.0).dimension().unwrap(), 59_319);
        assert_eq!(Cdr3dSpec::new(0.02, 1.0, [0.0; 3], 0.0).dimension().unwrap(), 117_649);
        assert_eq!(Cdr3dSpec::new(0.0125, 1.0, [0.0; 3], 0.0).dimension().unwrap(), 493_039);
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(generate_cdr3d(&Cdr3dSpec::new(0.3, 1.0, [0.0; 3], 0.0)).is_err());
        assert!(generate_cdr3d(&Cdr3dSpec::new(1.0, 1.0, [0.0; 3], 0.0)).is_err());
        assert!(generate_cdr3d(&Cdr3dSpec::new(-0.1, 1.0, [0.0; 3], 0.0)).is_err());
        assert!(generate_cdr3d(&Cdr3dSpec::new(0.0, 1.0, [0.0; 3], 0.0)).is_err());
    }

    #[test]
    fn stencil_structure() {
        let spec = Cdr3dSpec::new(0.125, 1.0, [0.0; 3], 0.0);
        let a = generate_cdr3d(&spec).unwrap();
        let n = 7;
        assert_eq!(a.dim(), n * n * n);
        assert!(a.nnz() <= 7 * a.dim());
        // the generated operator is ε∆ₕ, so −A has non-negative row sums,
        // zero exactly on rows with all six neighbors inside the domain
        for i in 0..a.dim() {
            let (ix, iy, iz) = (i % n, (i / n) % n, i / (n * n));
            let interior = [ix, iy, iz].iter().all(|&p| p > 0 && p + 1 < n);
            let s: f64 = (a.row_ptr()[i]..a.row_ptr()[i + 1]).map(|k| -a.values()[k]).sum();
            assert!(s >= 0.0);
            assert_eq!(s == 0.0, interior, "row {i}");
        }
    }

    #[test]
    fn pure_diffusion_is_symmetric() {
        let a = generate_cdr3d(&Cdr3dSpec::new(0.125, 2.5, [0.0; 3], 0.0)).unwrap();
        assert_eq!(a.max_asymmetry(), 0.0);
        let b = generate_cdr3d(&Cdr3dSpec::new(0.125, 1.0, [0.0, 3.0, 0.0], 0.0)).unwrap();
        assert!(b.max_asymmetry() > 0.0);
    }

    #[test]
    fn neighbor_coefficients() {
        // h = 1/4: N = 3, center point (1,1,1) has all six neighbors
        let h = 0.25;
        let beta = [1.0, 2.0, 3.0];
        let a = generate_cdr3d(&Cdr3dSpec::new(h, 1.0, beta, 7.0)).unwrap();
        let center = 1 + 3 + 9;
        assert_eq!(a.get(center, center), -6.0 * 16.0 + 7.0);
        for (k, stride) in [1usize, 3, 9].into_iter().enumerate() {
            assert_eq!(a.get(center, center + stride), 16.0 - beta[k] / (2.0 * h));
            assert_eq!(a.get(center, center - stride), 16.0 + beta[k] / (2.0 * h));
        }
        // corner (0,0,0) only couples forward
        assert_eq!(a.get(0, 1), 16.0 - beta[0] / (2.0 * h));
        assert_eq!((a.row_ptr()[1] - a.row_ptr()[0]), 4);
    }
}
