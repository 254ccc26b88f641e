//! Hessenberg process with ∞-norm pivoting.
//!
//! Builds a basis `L = [l₁, …, l_{m+1}]` with `(l_j)_{q_k} = 0` for `k < j`
//! and `(l_j)_{q_j} = 1` under the pivot permutation `q`, and the upper
//! Hessenberg factor `Ȟ` with `A L_m = L_{m+1} Ȟ_m`. Each step costs one
//! operator application and `j` axpys; no inner products are taken.

use crate::dense::HessenbergMatrix;
use crate::error::{Error, Result};
use crate::krylov::{KrylovBasis, StepOutcome};
use crate::scalar::Scalar;
use crate::vector::{axpy, norm_inf};

#[derive(Clone, Debug)]
pub struct PivotedHessenbergBasis<T> {
    basis: Vec<Vec<T>>,
    pivots: Vec<usize>,
    h: HessenbergMatrix<T>,
    alpha: T,
    breakdown: bool,
    breakdown_scale: f64,
    max_linf: f64,
    flops: u64,
}

impl<T: Scalar> PivotedHessenbergBasis<T> {
    /// Pivots `r0` on its largest entry and sets `l₁ = r₀/α`.
    ///
    /// Breakdown is declared when the eliminated vector satisfies
    /// `‖u‖_∞ ≤ breakdown_scale · max_j ‖l_j‖_∞`; pass `1e-14·‖A‖_F`.
    pub fn start(r0: &[T], breakdown_scale: f64) -> Result<Self> {
        let n = r0.len();
        let j0 = argmax_modulus(r0.iter().copied()).ok_or(Error::ZeroVector)?;
        let alpha = r0[j0];
        if alpha == T::zero() {
            return Err(Error::ZeroVector);
        }
        let mut pivots: Vec<usize> = (0..n).collect();
        pivots.swap(0, j0);
        let l1 = scaled_pivot_column(r0, alpha, &pivots, 0);
        let max_linf = norm_inf(&l1);
        Ok(PivotedHessenbergBasis {
            basis: vec![l1],
            pivots,
            h: HessenbergMatrix::new(),
            alpha,
            breakdown: false,
            breakdown_scale,
            max_linf,
            flops: n as u64,
        })
    }

    /// Pivot permutation `q` (0-based positions).
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

/// First index of largest modulus; `None` for an all-zero (or empty) input.
fn argmax_modulus<T: Scalar>(it: impl Iterator<Item = T>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in it.enumerate() {
        let m = v.modulus();
        if m > best.map_or(0.0, |b| b.1) {
            best = Some((k, m));
        }
    }
    best.map(|b| b.0)
}

/// `u / pivot_value` with the pivot-profile entries assigned exactly.
fn scaled_pivot_column<T: Scalar>(u: &[T], pivot_value: T, q: &[usize], j: usize) -> Vec<T> {
    let inv = T::one() / pivot_value;
    let mut l: Vec<T> = u.iter().map(|&v| v * inv).collect();
    for &p in &q[..j] {
        l[p] = T::zero();
    }
    l[q[j]] = T::one();
    l
}

impl<T: Scalar> KrylovBasis<T> for PivotedHessenbergBasis<T> {
    fn steps(&self) -> usize {
        self.h.cols()
    }

    fn dim(&self) -> usize {
        self.basis[0].len()
    }

    fn scale(&self) -> T {
        self.alpha
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
        for k in 0..=j {
            let p = self.pivots[k];
            let c = u[p];
            col[k] = c;
            if c != T::zero() {
                axpy(-c, &self.basis[k], &mut u);
            }
            u[p] = T::zero();
        }
        self.flops += 2 * (n as u64) * (j as u64 + 1);

        let rest = self.pivots[j + 1..].iter().map(|&p| u[p]);
        let cand = argmax_modulus(rest).map(|k| k + j + 1);
        let tol = self.breakdown_scale * self.max_linf;
        match cand {
            Some(j0) if j + 1 < n && u[self.pivots[j0]].modulus() > tol => {
                let hv = u[self.pivots[j0]];
                col[j + 1] = hv;
                self.pivots.swap(j + 1, j0);
                let l = scaled_pivot_column(&u, hv, &self.pivots, j + 1);
                self.max_linf = self.max_linf.max(norm_inf(&l));
                self.basis.push(l);
                self.flops += n as u64;
                self.h.push_column(col);
                StepOutcome::Continued
            }
            _ => {
                self.h.push_column(col);
                self.breakdown = true;
                StepOutcome::Breakdown
            }
        }
    }
}

/// Runs up to `m_max` steps of the pivoted Hessenberg process. `apply(x, y)`
/// must write `y ← Op·x`; it is called exactly once per completed step.
pub fn build_pivoted_hessenberg<T, F>(
    mut apply: F,
    r0: &[T],
    m_max: usize,
    breakdown_scale: f64,
) -> Result<PivotedHessenbergBasis<T>>
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
{
    if m_max == 0 {
        return Err(Error::InvalidArgument("at least one step required".into()));
    }
    let mut basis = PivotedHessenbergBasis::start(r0, breakdown_scale)?;
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

    fn build(a: &SparseMatrix<f64>, r0: &[f64], m: usize) -> PivotedHessenbergBasis<f64> {
        build_pivoted_hessenberg(|x, y| a.apply(x, y), r0, m, 1e-14 * a.frobenius_norm()).unwrap()
    }

    #[test]
    fn identity_breaks_down_after_one_step() {
        let a = SparseMatrix::<f64>::identity(2);
        let b = build(&a, &[1.0, 1.0], 5);
        assert_eq!(b.steps(), 1);
        assert!(b.breakdown());
        assert_eq!(b.hessenberg().to_dense(), vec![vec![1.0], vec![0.0]]);
    }

    #[test]
    fn diag_hand_trace() {
        let a = SparseMatrix::from_diagonal(&[2.0, 3.0]);
        let b = build(&a, &[1.0, 1.0], 5);
        assert_eq!(b.alpha(), 1.0);
        assert_eq!(b.steps(), 2);
        assert!(b.breakdown());
        assert_eq!(b.hessenberg().to_dense(), vec![vec![2.0, 0.0], vec![1.0, 3.0], vec![0.0, 0.0]]);
        assert_eq!(b.columns(), &[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert_eq!(b.pivots(), &[0, 1]);
    }

    #[test]
    fn pivot_selects_largest_entry() {
        let a = SparseMatrix::from_diagonal(&[2.0, 3.0]);
        let b = PivotedHessenbergBasis::start(&[1.0, 2.0], 0.0).unwrap();
        assert_eq!(b.alpha(), 2.0);
        assert_eq!(b.columns()[0], vec![0.5, 1.0]);
        assert_eq!(b.pivots(), &[1, 0]);
        let full = build(&a, &[1.0, 2.0], 2);
        assert_eq!(full.pivots(), &[1, 0]);
    }

    #[test]
    fn ties_pick_smallest_position() {
        let b = PivotedHessenbergBasis::start(&[1.0, -3.0, 3.0], 0.0).unwrap();
        assert_eq!(b.pivots(), &[1, 0, 2]);
        assert_eq!(b.alpha(), -3.0);
    }

    #[test]
    fn zero_start_is_an_error() {
        assert!(matches!(PivotedHessenbergBasis::<f64>::start(&[0.0, 0.0], 0.0), Err(Error::ZeroVector)));
    }

    #[test]
    fn stops_at_full_dimension() {
        let a = SparseMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.5, 1.0, 2.0],
        ])
        .unwrap();
        let b = build(&a, &[1.0, 0.0, 0.0], 10);
        assert_eq!(b.steps(), 3);
        assert!(b.breakdown());
        assert_eq!(b.columns().len(), 3);
        assert_eq!(b.hessenberg().get(3, 2), 0.0);
    }
}
