//! Compressed-row sparse storage and matrix-vector kernels.

use std::cell::Cell;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// Square sparse matrix in canonical compressed row form.
///
/// Canonical means: column indices strictly increasing inside each row,
/// duplicates summed, and no stored entries that are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Builds a canonical matrix from (row, col, value) triplets with 0-based
    /// indices. Duplicates are summed; entries summing to zero are dropped.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut entries: Vec<(usize, usize, T)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidStructure(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
            entries.push((i, j, v));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut k = 0;
        while k < entries.len() {
            let (i, j, mut v) = entries[k];
            k += 1;
            while k < entries.len() && entries[k].0 == i && entries[k].1 == j {
                v += entries[k].2;
                k += 1;
            }
            if v != T::zero() {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Wraps raw CSR arrays, validating the canonical-form invariants.
    pub fn from_csr(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row pointer length or origin".into()));
        }
        if col_idx.len() != values.len() || *row_ptr.last().unwrap() != values.len() {
            return Err(Error::InvalidStructure("row pointer does not end at nnz".into()));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidStructure(format!("row pointer decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.iter().any(|&c| c >= n) {
                return Err(Error::InvalidStructure(format!("column index out of range in row {i}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!("row {i} not strictly increasing")));
            }
        }
        if values.iter().any(|v| *v == T::zero()) {
            return Err(Error::InvalidStructure("explicitly stored zero".into()));
        }
        Ok(SparseMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal entries are in range")
    }

    /// Dense row-major input, mostly for tests and small examples.
    pub fn from_dense(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut trips = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            check_dim(n, r.len())?;
            for (j, &v) in r.iter().enumerate() {
                trips.push((i, j, v));
            }
        }
        Self::from_triplets(n, trips)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
        }
        d
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Iterates stored entries as (row, col, value) in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => T::zero(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// y = A x into a caller buffer. Each row is summed left to right.
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) -> Result<()> {
        check_dim(self.n, x.len())?;
        check_dim(self.n, y.len())?;
        self.matvec_unchecked(x, y);
        Ok(())
    }

    #[inline]
    fn matvec_unchecked(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    /// (A − σI) x without forming A − σI.
    pub fn apply_shifted(&self, sigma: T, x: &[T]) -> Result<Vec<T>> {
        let mut y = self.matvec(x)?;
        if sigma != T::zero() {
            for (yi, &xi) in y.iter_mut().zip(x) {
                *yi -= sigma * xi;
            }
        }
        Ok(y)
    }

    /// Returns A − σI as a new stored matrix.
    pub fn shifted_copy(&self, sigma: T) -> Self {
        let trips = self
            .iter()
            .chain((0..self.n).map(|i| (i, i, -sigma)));
        Self::from_triplets(self.n, trips.collect::<Vec<_>>()).expect("indices already valid")
    }

    /// −A.
    pub fn negated(&self) -> Self {
        SparseMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| -v).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.n, self.iter().map(|(i, j, v)| (j, i, v)).collect::<Vec<_>>())
            .expect("indices already valid")
    }

    /// Largest |A_ij − A_ji| over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        self.iter()
            .map(|(i, j, v)| (v - self.get(j, i)).modulus())
            .fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        SparseMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| Complex64::new(v.re(), v.im())).collect(),
        }
    }
}

/// Anything that maps n-vectors to n-vectors linearly.
pub trait LinearOperator<T: Scalar> {
    fn dim(&self) -> usize;

    /// y ← Op·x. `x` and `y` have length `dim()`.
    fn apply(&self, x: &[T], y: &mut [T]);

    /// Frobenius norm (or an upper estimate), used for relative tolerances.
    fn norm_estimate(&self) -> f64;

    /// Stored nonzeros, for flop accounting.
    fn nnz(&self) -> usize;
}

impl<T: Scalar> LinearOperator<T> for SparseMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matvec_unchecked(x, y);
    }

    fn norm_estimate(&self) -> f64 {
        self.frobenius_norm()
    }

    fn nnz(&self) -> usize {
        self.values.len()
    }
}

/// Lazily shifted operator A − σI.
#[derive(Clone, Copy, Debug)]
pub struct Shifted<'a, T> {
    pub matrix: &'a SparseMatrix<T>,
    pub sigma: T,
}

impl<'a, T: Scalar> Shifted<'a, T> {
    pub fn new(matrix: &'a SparseMatrix<T>, sigma: T) -> Self {
        Shifted { matrix, sigma }
    }
}

impl<T: Scalar> LinearOperator<T> for Shifted<'_, T> {
    fn dim(&self) -> usize {
        self.matrix.n
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matrix.matvec_unchecked(x, y);
        if self.sigma != T::zero() {
            for (yi, &xi) in y.iter_mut().zip(x) {
                *yi -= self.sigma * xi;
            }
        }
    }

    fn norm_estimate(&self) -> f64 {
        let d = self.sigma.modulus();
        if d == 0.0 {
            return self.matrix.frobenius_norm();
        }
        // ‖A − σI‖_F computed exactly on the diagonal
        let mut sq = 0.0;
        for i in 0..self.matrix.n {
            sq += (self.matrix.get(i, i) - self.sigma).modulus_sqr();
        }
        for (i, j, v) in self.matrix.iter() {
            if i != j {
                sq += v.modulus_sqr();
            }
        }
        sq.sqrt()
    }

    fn nnz(&self) -> usize {
        self.matrix.nnz() + self.matrix.n
    }
}

/// Operator wrapper that counts applications (matrix-vector products).
///
/// Counters live with the solver instance, never in the shared matrix.
pub struct Counted<'a, T, O: ?Sized> {
    inner: &'a O,
    mvps: Cell<u64>,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Scalar, O: LinearOperator<T> + ?Sized> Counted<'a, T, O> {
    pub fn new(inner: &'a O) -> Self {
        Counted {
            inner,
            mvps: Cell::new(0),
            _marker: std::marker::PhantomData,
        }
    }

    pub fn mvps(&self) -> u64 {
        self.mvps.get()
    }

    pub fn inner(&self) -> &O {
        self.inner
    }

    /// Checked application returning a fresh vector.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.inner.dim(), x.len())?;
        let mut y = vec![T::zero(); x.len()];
        self.apply(x, &mut y);
        Ok(y)
    }
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for Counted<'_, T, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.mvps.set(self.mvps.get() + 1);
        self.inner.apply(x, y);
    }

    fn norm_estimate(&self) -> f64 {
        self.inner.norm_estimate()
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag23() -> SparseMatrix<f64> {
        SparseMatrix::from_diagonal(&[2.0, 3.0])
    }

    #[test]
    fn identity_matvec() {
        let a = SparseMatrix::<f64>::identity(3);
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let a = SparseMatrix::from_dense(&[vec![1.0, -2.0], vec![4.0, 0.5]]).unwrap();
        assert_eq!(a.matvec(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn diagonal_row_sums() {
        assert_eq!(diag23().matvec(&[1.0, 1.0]).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            diag23().matvec(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(diag23().apply_shifted(1.0, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn shifted_application() {
        let a = diag23();
        assert_eq!(a.apply_shifted(0.0, &[1.0, 1.0]).unwrap(), a.matvec(&[1.0, 1.0]).unwrap());
        assert_eq!(a.apply_shifted(-1.0, &[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
        let id = SparseMatrix::<f64>::identity(3);
        assert_eq!(id.apply_shifted(1.0, &[5.0, -1.0, 2.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn counted_operator_counts_each_application() {
        let a = diag23();
        let op = Counted::new(&a);
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, 1.0], &mut y);
        op.apply(&y.clone(), &mut y);
        assert_eq!(op.mvps(), 2);
        assert_eq!(y, vec![4.0, 9.0]);
        let s = Shifted::new(&a, -1.0);
        let op = Counted::new(&s);
        assert_eq!(op.matvec(&[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(op.mvps(), 1);
    }

    #[test]
    fn triplets_are_canonicalized() {
        let a = SparseMatrix::from_triplets(
            3,
            vec![(2, 1, 1.0), (0, 2, 5.0), (0, 0, 1.0), (2, 1, 2.0), (1, 1, 4.0), (1, 1, -4.0)],
        )
        .unwrap();
        assert_eq!(a.row_ptr(), &[0, 2, 2, 3]);
        assert_eq!(a.col_indices(), &[0, 2, 1]);
        assert_eq!(a.values(), &[1.0, 5.0, 3.0]);
        assert!(SparseMatrix::from_triplets(2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn csr_validation() {
        assert!(SparseMatrix::from_csr(2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
        assert!(SparseMatrix::from_csr(2, vec![0, 2, 1], vec![0, 1], vec![1.0, 2.0]).is_err());
        assert!(SparseMatrix::from_csr(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 2.0]).is_err());
        assert!(SparseMatrix::from_csr(2, vec![0, 1, 2], vec![0, 2], vec![1.0, 2.0]).is_err());
        assert!(SparseMatrix::from_csr(2, vec![0, 1, 2], vec![0, 1], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn shifted_norm_estimate_is_exact() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        let s = Shifted::new(&a, 1.0);
        let direct = a.shifted_copy(1.0).frobenius_norm();
        assert!((s.norm_estimate() - direct).abs() < 1e-15);
    }

    fn small_matrix() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, f64, f64)> {
        (1usize..8).prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, n), n),
                proptest::collection::vec(-10.0..10.0f64, n),
                proptest::collection::vec(-10.0..10.0f64, n),
                -3.0..3.0f64,
                -3.0..3.0f64,
            )
        })
    }

    proptest! {
        #[test]
        fn matvec_is_linear((rows, x, y, a, b) in small_matrix()) {
            let m = SparseMatrix::from_dense(&rows).unwrap();
            let comb: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let lhs = m.matvec(&comb).unwrap();
            let mx = m.matvec(&x).unwrap();
            let my = m.matvec(&y).unwrap();
            let rhs: Vec<f64> = mx.iter().zip(&my).map(|(p, q)| a * p + b * q).collect();
            let scale: f64 = rows.iter().flatten().map(|v| v.abs()).sum::<f64>()
                * (x.iter().chain(&y).map(|v| v.abs()).fold(0.0, f64::max)) * 6.0 + 1.0;
            for (l, r) in lhs.iter().zip(&rhs) {
                prop_assert!((l - r).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn zero_shift_is_bitwise_matvec((rows, x, _y, _a, _b) in small_matrix()) {
            let m = SparseMatrix::from_dense(&rows).unwrap();
            let p = m.apply_shifted(0.0, &x).unwrap();
            let q = m.matvec(&x).unwrap();
            prop_assert_eq!(p.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            q.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }
}
