//! Dense vector helpers. Vectors are plain `Vec<T>` / `&[T]`.

use crate::scalar::Scalar;

/// Hermitian inner product `xᴴy`.
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a.conj() * b).sum()
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    // scaled accumulation, avoids overflow for huge entries
    let scale = norm_inf(x);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v.scale(1.0 / scale)).modulus_sqr()).sum();
    scale * s.sqrt()
}

pub fn norm_inf<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.modulus()).fold(0.0, f64::max)
}

/// y ← y + a·x
#[inline]
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale<T: Scalar>(a: T, x: &mut [T]) {
    for v in x {
        *v *= a;
    }
}

/// x − y
pub fn sub<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

/// Σ_k cols[k]·coef[k], over the first `coef.len()` columns.
pub fn combine<T: Scalar>(cols: &[Vec<T>], coef: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (c, &a) in cols.iter().zip(coef) {
        axpy(a, c, &mut out);
    }
    out
}
