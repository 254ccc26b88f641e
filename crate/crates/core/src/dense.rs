//! Small dense kernels on (m+1)×m upper Hessenberg factors.
//!
//! Everything here is O(m²) per call: Givens least squares for the seed
//! quasi-residual problem, the bordered collinearity solve for additional
//! shifts, and square shifted solves for the fixed-step inner methods.

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// (m+1)×m upper Hessenberg matrix.
///
/// Column `j` stores only rows `0..=j+1`; everything below the first
/// subdiagonal is structurally zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HessenbergMatrix<T> {
    cols: Vec<Vec<T>>,
}

impl<T: Scalar> Default for HessenbergMatrix<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> HessenbergMatrix<T> {
    /// The empty 1×0 factor.
    pub fn new() -> Self {
        HessenbergMatrix { cols: Vec::new() }
    }

    /// From a dense row-major (m+1)×m array; rejects nonzeros below the
    /// subdiagonal.
    pub fn from_dense(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("hessenberg factor needs at least one row".into()));
        }
        let m = rows.len() - 1;
        let mut h = Self::new();
        for r in rows {
            check_dim(m, r.len())?;
        }
        for j in 0..m {
            for (i, r) in rows.iter().enumerate().skip(j + 2) {
                if r[j] != T::zero() {
                    return Err(Error::InvalidArgument(format!("nonzero below subdiagonal at ({i}, {j})")));
                }
            }
            h.cols.push((0..j + 2).map(|i| rows[i][j]).collect());
        }
        Ok(h)
    }

    /// Appends column `j = self.cols()`; `col` must hold rows `0..=j+1`.
    pub fn push_column(&mut self, col: Vec<T>) {
        assert_eq!(col.len(), self.cols.len() + 2, "hessenberg column length");
        self.cols.push(col);
    }

    pub fn rows(&self) -> usize {
        self.cols.len() + 1
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.cols[j].get(i).copied().unwrap_or_else(T::zero)
    }

    /// Stored part (rows `0..=j+1`) of column `j`.
    pub fn column(&self, j: usize) -> &[T] {
        &self.cols[j]
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.cols[j]
    }

    /// Leading (k+1)×k block.
    pub fn leading(&self, k: usize) -> Self {
        HessenbergMatrix {
            cols: self.cols[..k].to_vec(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.cols.iter().flatten().map(|v| v.modulus_sqr()).sum::<f64>().sqrt()
    }

    /// H·y, an (m+1)-vector.
    pub fn mul_vec(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows()];
        for (col, &yj) in self.cols.iter().zip(y) {
            for (o, &h) in out.iter_mut().zip(col) {
                *o += h * yj;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Ȟ(σ) = Ȟ − σ·[I; 0].
pub fn shift_hessenberg<T: Scalar>(h: &HessenbergMatrix<T>, sigma: T) -> HessenbergMatrix<T> {
    let mut out = h.clone();
    if sigma != T::zero() {
        for j in 0..out.cols() {
            out.cols[j][j] -= sigma;
        }
    }
    out
}

/// Complex Givens rotation `[c s; −s̄ c]` with real `c`.
#[derive(Clone, Copy, Debug)]
struct Givens<T> {
    c: f64,
    s: T,
}

impl<T: Scalar> Givens<T> {
    /// Rotation zeroing `b` in (a, b); returns the rotation and the new `a`.
    fn make(a: T, b: T) -> (Self, T) {
        if b == T::zero() {
            return (Givens { c: 1.0, s: T::zero() }, a);
        }
        let am = a.modulus();
        if am == 0.0 {
            return (Givens { c: 0.0, s: T::one() }, b);
        }
        let rho = am.hypot(b.modulus());
        let phase = a.scale(1.0 / am);
        let s = (phase * b.conj()).scale(1.0 / rho);
        (Givens { c: am / rho, s }, phase.scale(rho))
    }

    #[inline]
    fn apply(&self, a: &mut T, b: &mut T) {
        let (x, y) = (*a, *b);
        *a = x.scale(self.c) + self.s * y;
        *b = y.scale(self.c) - self.s.conj() * x;
    }
}

/// Multiply-add count of one rotation application.
const ROT_FLOPS: u64 = 6;

/// Incremental Givens QR of a growing Hessenberg factor against `α e₁`.
///
/// After each pushed column the current least-squares residual norm is
/// available in O(1), which gives the in-cycle quasi-residual history.
#[derive(Clone, Debug)]
pub struct GivensLsq<T> {
    r: Vec<Vec<T>>,
    rots: Vec<Givens<T>>,
    g: Vec<T>,
    sq_norm: f64,
    flops: u64,
}

impl<T: Scalar> GivensLsq<T> {
    pub fn new(alpha: T) -> Self {
        GivensLsq {
            r: Vec::new(),
            rots: Vec::new(),
            g: vec![alpha],
            sq_norm: 0.0,
            flops: 0,
        }
    }

    pub fn cols(&self) -> usize {
        self.r.len()
    }

    /// Adds column `j` (rows `0..=j+1`) and returns the new residual norm.
    pub fn push_column(&mut self, col: &[T]) -> f64 {
        let j = self.r.len();
        assert_eq!(col.len(), j + 2, "hessenberg column length");
        self.sq_norm += col.iter().map(|v| v.modulus_sqr()).sum::<f64>();
        let mut c = col.to_vec();
        for (k, rot) in self.rots.iter().enumerate() {
            let (lo, hi) = c.split_at_mut(k + 1);
            rot.apply(&mut lo[k], &mut hi[0]);
        }
        let (rot, diag) = Givens::make(c[j], c[j + 1]);
        c[j] = diag;
        c.truncate(j + 1);
        self.g.push(T::zero());
        let (lo, hi) = self.g.split_at_mut(j + 1);
        rot.apply(&mut lo[j], &mut hi[0]);
        self.rots.push(rot);
        self.r.push(c);
        self.flops += ROT_FLOPS * (j as u64 + 2);
        self.residual_norm()
    }

    /// ‖α e₁ − H y‖ for the minimizer over the columns pushed so far.
    pub fn residual_norm(&self) -> f64 {
        self.g.last().map_or(0.0, |v| v.modulus())
    }

    pub fn flops(&self) -> u64 {
        self.flops
    }

    /// Back substitution for the minimizer.
    pub fn solve(&mut self) -> Result<Vec<T>> {
        let m = self.r.len();
        let tol = rank_tol(m, self.sq_norm.sqrt());
        let mut y: Vec<T> = self.g[..m].to_vec();
        for k in (0..m).rev() {
            let d = self.r[k][k];
            if d.modulus() <= tol {
                return Err(Error::Singular { column: k });
            }
            y[k] /= d;
            let yk = y[k];
            for i in 0..k {
                y[i] -= self.r[k][i] * yk;
            }
        }
        self.flops += (m * (m + 1)) as u64;
        Ok(y)
    }
}

fn rank_tol(m: usize, norm: f64) -> f64 {
    4.0 * f64::EPSILON * (m.max(1) as f64) * norm
}

/// Least-squares solution of `min ‖α e₁ − H y‖₂`.
#[derive(Clone, Debug)]
pub struct LsqSolution<T> {
    pub y: Vec<T>,
    /// Quasi-residual `α e₁ − H y`.
    pub u: Vec<T>,
    pub flops: u64,
}

/// Solves `min ‖α e₁ − H y‖₂` by Givens rotations and returns the minimizer
/// together with the residual vector `u = α e₁ − H y`.
pub fn hessenberg_lsq<T: Scalar>(h: &HessenbergMatrix<T>, alpha: T) -> Result<LsqSolution<T>> {
    let mut lsq = GivensLsq::new(alpha);
    for j in 0..h.cols() {
        lsq.push_column(h.column(j));
    }
    let y = lsq.solve()?;
    let hy = h.mul_vec(&y);
    let mut u: Vec<T> = hy.into_iter().map(|v| -v).collect();
    u[0] += alpha;
    let m = h.cols() as u64;
    Ok(LsqSolution {
        y,
        u,
        flops: lsq.flops() + m * (m + 3) / 2 * 2,
    })
}

/// Solves a square upper Hessenberg system given column-major (every
/// column full length) by Givens elimination of the subdiagonal.
fn solve_square_upper_hessenberg<T: Scalar>(
    mut a: Vec<Vec<T>>,
    mut rhs: Vec<T>,
    norm: f64,
    flops: &mut u64,
) -> Result<Vec<T>> {
    let n = rhs.len();
    for j in 0..n.saturating_sub(1) {
        let (rot, diag) = Givens::make(a[j][j], a[j][j + 1]);
        a[j][j] = diag;
        a[j][j + 1] = T::zero();
        for col in a.iter_mut().skip(j + 1) {
            let (lo, hi) = col.split_at_mut(j + 1);
            rot.apply(&mut lo[j], &mut hi[0]);
        }
        let (lo, hi) = rhs.split_at_mut(j + 1);
        rot.apply(&mut lo[j], &mut hi[0]);
        *flops += ROT_FLOPS * (n - j) as u64;
    }
    let tol = rank_tol(n, norm);
    let mut y = rhs;
    for k in (0..n).rev() {
        let d = a[k][k];
        if d.modulus() <= tol {
            return Err(Error::Singular { column: k });
        }
        y[k] /= d;
        let yk = y[k];
        for i in 0..k {
            y[i] -= a[k][i] * yk;
        }
    }
    *flops += (n * (n + 1)) as u64;
    Ok(y)
}

/// Solution of the bordered collinearity system.
#[derive(Clone, Debug)]
pub struct BorderedSolution<T> {
    pub y: Vec<T>,
    pub gamma: T,
    pub flops: u64,
}

/// Solves `[H(σ) | u] [y; γ] = rhs_scale · e₁`.
///
/// A singular bordered matrix means the seed residual polynomial vanishes at
/// this shift; that case is reported as [`Error::ResidualPolynomialVanishes`].
pub fn solve_bordered<T: Scalar>(
    h_sigma: &HessenbergMatrix<T>,
    u: &[T],
    rhs_scale: T,
) -> Result<BorderedSolution<T>> {
    let m = h_sigma.cols();
    check_dim(m + 1, u.len())?;
    let mut a: Vec<Vec<T>> = (0..m)
        .map(|j| {
            let mut c = h_sigma.column(j).to_vec();
            c.resize(m + 1, T::zero());
            c
        })
        .collect();
    a.push(u.to_vec());
    let mut rhs = vec![T::zero(); m + 1];
    rhs[0] = rhs_scale;
    let norm = h_sigma.frobenius_norm() + crate::vector::norm2(u);
    let mut flops = 0;
    let mut sol = match solve_square_upper_hessenberg(a, rhs, norm, &mut flops) {
        Ok(s) => s,
        Err(Error::Singular { .. }) => return Err(Error::ResidualPolynomialVanishes),
        Err(e) => return Err(e),
    };
    let gamma = sol.pop().expect("m+1 unknowns");
    Ok(BorderedSolution { y: sol, gamma, flops })
}

/// Square shifted solve used by FOM-type inner methods.
#[derive(Clone, Debug)]
pub struct SquareSolution<T> {
    pub y: Vec<T>,
    /// −ȟ_{m+1,m}·y_m, the residual coefficient along the next basis vector.
    pub beta_last: T,
    pub flops: u64,
}

/// Solves `(H_{1:m,1:m} − σI) y = α e₁` for an (m+1)×m Hessenberg `H`.
pub fn solve_square_hessenberg_shifted<T: Scalar>(
    h: &HessenbergMatrix<T>,
    sigma: T,
    alpha: T,
) -> Result<SquareSolution<T>> {
    let m = h.cols();
    if m == 0 {
        return Err(Error::InvalidArgument("empty hessenberg factor".into()));
    }
    let a: Vec<Vec<T>> = (0..m)
        .map(|j| {
            let mut c: Vec<T> = h.column(j).iter().take(m).copied().collect();
            c.resize(m, T::zero());
            c[j] -= sigma;
            c
        })
        .collect();
    let norm = a.iter().flatten().map(|v| v.modulus_sqr()).sum::<f64>().sqrt();
    let mut rhs = vec![T::zero(); m];
    rhs[0] = alpha;
    let mut flops = 0;
    let y = solve_square_upper_hessenberg(a, rhs, norm, &mut flops)?;
    let beta_last = -(h.get(m, m - 1) * y[m - 1]);
    Ok(SquareSolution { y, beta_last, flops })
}
