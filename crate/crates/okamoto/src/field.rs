//! Scalar fields used by the algebraic layer.
//!
//! Everything in [`crate::parabolic`] is generic over [`Field`], so the same
//! code runs in `Complex64` for numerics and in Gaussian rationals
//! ([`QC`]) when exact verdicts are wanted.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Gaussian rationals `Q(i)`.
pub type QC = Complex<BigRational>;

/// Relative tolerance used by float comparisons in the algebraic layer.
pub const FLOAT_REL_TOL: f64 = 1e-10;

/// Absolute tolerance for integrality of floats.
pub const FLOAT_INT_TOL: f64 = 1e-12;

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    /// Exact for floats with a finite binary expansion.
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Zero test. Exact fields ignore `scale`; floats use
    /// `|x| <= FLOAT_REL_TOL * max(1, scale)`.
    fn is_zero_within(&self, scale: f64) -> bool;

    fn is_exact_zero(&self) -> bool;

    fn is_integer(&self) -> bool;
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero_within(&self, scale: f64) -> bool {
        self.norm() <= FLOAT_REL_TOL * scale.max(1.0)
    }
    fn is_exact_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_integer(&self) -> bool {
        self.im.abs() <= FLOAT_INT_TOL && (self.re - self.re.round()).abs() <= FLOAT_INT_TOL
    }
}

impl Field for QC {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
    fn from_c64(z: Complex64) -> Self {
        let conv = |x: f64| BigRational::from_float(x).expect("finite float");
        Complex::new(conv(z.re), conv(z.im))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn is_zero_within(&self, _scale: f64) -> bool {
        self.is_exact_zero()
    }
    fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }
}

/// Shorthand for a rational Gaussian number `a/b + (c/d) i`.
pub fn qc(re: (i64, i64), im: (i64, i64)) -> QC {
    Complex::new(
        BigRational::new(re.0.into(), re.1.into()),
        BigRational::new(im.0.into(), im.1.into()),
    )
}

/// Shorthand for a real rational `a/b`.
pub fn qr(num: i64, den: i64) -> QC {
    qc((num, den), (0, 1))
}
