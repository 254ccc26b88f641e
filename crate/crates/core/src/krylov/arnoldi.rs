//! Modified Gram–Schmidt Arnoldi process, the orthonormal counterpart used
//! by the GMRES/FOM baselines.

use crate::dense::HessenbergMatrix;
use crate::error::{Error, Result};
use crate::krylov::{KrylovBasis, StepOutcome};
use crate::scalar::Scalar;
use crate::vector::{axpy, dot, norm2};

#[derive(Clone, Debug)]
pub struct ArnoldiBasis<T> {
    basis: Vec<Vec<T>>,
    h: HessenbergMatrix<T>,
    beta: f64,
    breakdown: bool,
    breakdown_scale: f64,
    flops: u64,
}

impl<T: Scalar> ArnoldiBasis<T> {
    /// `v₁ = r₀/‖r₀‖₂`. Breakdown when `‖u‖₂ ≤ breakdown_scale`.
    pub fn start(r0: &[T], breakdown_scale: f64) -> Result<Self> {
        let beta = norm2(r0);
        if beta == 0.0 {
            return Err(Error::ZeroVector);
        }
        let v1: Vec<T> = r0.iter().map(|v| v.scale(1.0 / beta)).collect();
        Ok(ArnoldiBasis {
            basis: vec![v1],
            h: HessenbergMatrix::new(),
            beta,
            breakdown: false,
            breakdown_scale,
            flops: 3 * r0.len() as u64,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl<T: Scalar> KrylovBasis<T> for ArnoldiBasis<T> {
    fn steps(&self) -> usize {
        self.h.cols()
    }

    fn dim(&self) -> usize {
        self.basis[0].len()
    }

    fn scale(&self) -> T {
        T::from_real(self.beta)
    }

    fn columns(&self) -> &[Vec<T>] {
        &self.basis
    }

    fn hessenberg(&self) -> &HessenbergMatrix<T> {
        &self.h
    }

    fn breakdown(&self) -> bool {
        self.breakdown
    }

    fn flops(&self) -> u64 {
        self.flops
    }

    fn extend(&mut self, mut u: Vec<T>) -> StepOutcome {
        assert!(!self.breakdown, "basis already broke down");
        let j = self.h.cols();
        let n = u.len();
        let mut col = vec![T::zero(); j + 2];
        for (k, v) in self.basis.iter().enumerate() {
            let c = dot(v, &u);
            col[k] = c;
            axpy(-c, v, &mut u);
        }
        let nu = norm2(&u);
        self.flops += 4 * (n as u64) * (j as u64 + 1) + 2 * n as u64;
        if j + 1 < n && nu > self.breakdown_scale {
            col[j + 1] = T::from_real(nu);
            let v: Vec<T> = u.iter().map(|x| x.scale(1.0 / nu)).collect();
            self.basis.push(v);
            self.flops += n as u64;
            self.h.push_column(col);
            StepOutcome::Continued
        } else {
            self.h.push_column(col);
            self.breakdown = true;
            StepOutcome::Breakdown
        }
    }
}

/// Runs up to `m_max` Arnoldi steps.
pub fn build_arnoldi<T, F>(mut apply: F, r0: &[T], m_max: usize, breakdown_scale: f64) -> Result<ArnoldiBasis<T>>
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
{
    if m_max == 0 {
        return Err(Error::InvalidArgument("at least one step required".into()));
    }
    let mut basis = ArnoldiBasis::start(r0, breakdown_scale)?;
    let mut u = vec![T::zero(); r0.len()];
    for _ in 0..m_max {
        apply(basis.next_vector(), &mut u);
        if basis.extend(u.clone()) == StepOutcome::Breakdown {
            break;
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{LinearOperator, SparseMatrix};

    fn build(a: &SparseMatrix<f64>, r0: &[f64], m: usize) -> ArnoldiBasis<f64> {
        build_arnoldi(|x, y| a.apply(x, y), r0, m, 1e-14 * a.frobenius_norm()).unwrap()
    }

    #[test]
    fn identity_breaks_down() {
        let a = SparseMatrix::<f64>::identity(2);
        let b = build(&a, &[1.0, 1.0], 4);
        assert_eq!(b.steps(), 1);
        assert!(b.breakdown());
        let h = b.hessenberg().to_dense();
        assert!((h[0][0] - 1.0).abs() < 1e-15);
        assert_eq!(h[1][0], 0.0);
    }

    #[test]
    fn orthonormal_on_diag() {
        let a = SparseMatrix::from_diagonal(&[2.0, 3.0]);
        let s = 0.5f64.sqrt();
        let b = build(&a, &[s, s], 4);
        let v = b.columns();
        for i in 0..v.len() {
            for j in 0..v.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&v[i], &v[j]) - want).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn coefficients_are_rayleigh_quotients() {
        // dense Gram–Schmidt oracle: h_ij = v_iᵀ A v_j
        let a = SparseMatrix::from_diagonal(&[2.0, 3.0]);
        let b = build(&a, &[1.0, 1.0], 4);
        assert_eq!(b.beta(), 2f64.sqrt());
        let v = b.columns();
        for j in 0..b.steps() {
            let av = a.matvec(&v[j]).unwrap();
            for i in 0..=j.min(v.len() - 1) {
                let want = dot(&v[i], &av);
                assert!((b.hessenberg().get(i, j) - want).abs() < 1e-14);
            }
        }
        assert!((b.hessenberg().get(0, 0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn zero_start_is_an_error() {
        assert!(ArnoldiBasis::<f64>::start(&[0.0; 3], 0.0).is_err());
    }
}
