//! Scalar field abstraction shared by every kernel and solver.
//!
//! Two fields are supported: real double precision (`f64`) and complex
//! double precision ([`Complex64`]). A single solve never mixes them; callers
//! that need complex shifts on a real matrix promote the matrix first with
//! [`SparseMatrix::to_complex`](crate::SparseMatrix::to_complex).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex64;
use num_traits::NumAssign;

use crate::error::{Error, Result};

/// Field tag of a scalar type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

/// Real or complex double-precision scalar.
pub trait Scalar:
    Copy + Debug + Display + PartialEq + Send + Sync + NumAssign + Sum + std::ops::Neg<Output = Self> + 'static
{
    const FIELD: Field;

    fn from_real(re: f64) -> Self;

    /// Builds a scalar from its parts. Returns `None` when `im != 0` and the
    /// field is real.
    fn from_parts(re: f64, im: f64) -> Option<Self>;

    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;

    /// |x|.
    fn modulus(self) -> f64;

    /// |x|², without the square root.
    fn modulus_sqr(self) -> f64;

    /// Division that reports a zero divisor instead of producing inf/NaN.
    fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / rhs)
        }
    }

    /// Multiplies by a real factor.
    #[inline]
    fn scale(self, f: f64) -> Self {
        self * Self::from_real(f)
    }

    fn is_finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    #[inline]
    fn from_real(re: f64) -> Self {
        re
    }

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }

    #[inline]
    fn re(self) -> f64 {
        self
    }

    #[inline]
    fn im(self) -> f64 {
        0.0
    }

    #[inline]
    fn conj(self) -> Self {
        self
    }

    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }

    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }

    #[inline]
    fn scale(self, f: f64) -> Self {
        self * f
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    #[inline]
    fn from_real(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }

    #[inline]
    fn re(self) -> f64 {
        self.re
    }

    #[inline]
    fn im(self) -> f64 {
        self.im
    }

    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }

    #[inline]
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }

    #[inline]
    fn scale(self, f: f64) -> Self {
        Complex64::new(self.re * f, self.im * f)
    }
}
