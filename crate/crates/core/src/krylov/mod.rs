//! Krylov basis builders.
//!
//! Both builders run through an operator callback: the caller applies the
//! operator to [`KrylovBasis::next_vector`] and hands the product to
//! [`KrylovBasis::extend`]. Flexible outer loops use this to substitute
//! `A z_j` for `A l_j`.

mod arnoldi;
mod hessenberg;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use arnoldi::{build_arnoldi, ArnoldiBasis};
pub use hessenberg::{build_pivoted_hessenberg, PivotedHessenbergBasis};

use crate::dense::HessenbergMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Breakdown threshold factor applied to ‖A‖_F.
pub const BREAKDOWN_FACTOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Continued,
    /// ȟ_{j+1,j} = 0: the space is invariant under the operator.
    Breakdown,
}

/// Which basis builder a solver runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// Pivoted Hessenberg process (CMRH family).
    Hessenberg,
    /// Arnoldi with modified Gram–Schmidt (GMRES/FOM family).
    Arnoldi,
}

pub trait KrylovBasis<T: Scalar> {
    /// Completed steps m (columns of Ȟ).
    fn steps(&self) -> usize;

    fn dim(&self) -> usize;

    /// Scaling of the start vector: α for Hessenberg, ‖r₀‖₂ for Arnoldi.
    fn scale(&self) -> T;

    /// Basis columns; m+1 of them, or m after breakdown.
    fn columns(&self) -> &[Vec<T>];

    /// (m+1)×m factor.
    fn hessenberg(&self) -> &HessenbergMatrix<T>;

    fn breakdown(&self) -> bool;

    /// Accumulated basis-construction flops (excluding operator products).
    fn flops(&self) -> u64;

    /// Consumes `u = Op·next_vector()` and appends one step.
    fn extend(&mut self, u: Vec<T>) -> StepOutcome;

    /// The column the operator must be applied to next.
    fn next_vector(&self) -> &[T] {
        &self.columns()[self.steps()]
    }
}

/// Creates a boxed basis of the requested kind.
pub(crate) fn start_basis<T: Scalar>(
    kind: BasisKind,
    r0: &[T],
    breakdown_scale: f64,
) -> Result<Box<dyn KrylovBasis<T>>> {
    Ok(match kind {
        BasisKind::Hessenberg => Box::new(PivotedHessenbergBasis::start(r0, breakdown_scale)?),
        BasisKind::Arnoldi => Box::new(ArnoldiBasis::start(r0, breakdown_scale)?),
    })
}

/// κ₂ of the column slab, `σ_max/σ_min` from a dense SVD.
pub fn basis_condition_number<T: Scalar>(cols: &[Vec<T>]) -> Result<f64> {
    let k = cols.len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty basis".into()));
    }
    let n = cols[0].len();
    if cols.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidArgument("ragged basis columns".into()));
    }
    let m = DMatrix::<Complex64>::from_fn(n, k, |i, j| Complex64::new(cols[j][i].re(), cols[j][i].im()));
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if sv.len() < k || smax == 0.0 || smin <= smax * f64::EPSILON * (n.max(k) as f64) {
        return Err(Error::RankDeficient);
    }
    Ok(smax / smin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_of_orthonormal_and_single_columns() {
        let e = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((basis_condition_number(&e).unwrap() - 1.0).abs() < 1e-14);
        assert!((basis_condition_number(&[vec![3.0, -4.0]]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn condition_of_unit_lower_pair() {
        // LᵀL = [[2,1],[1,1]], eigenvalues (3±√5)/2, κ = (3+√5)/2
        let l = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        let want = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((basis_condition_number(&l).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_slab() {
        let l = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(basis_condition_number(&l), Err(Error::RankDeficient)));
        assert!(basis_condition_number::<f64>(&[]).is_err());
    }
}
