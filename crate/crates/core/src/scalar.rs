//! Scalar abstractions shared by every layer of the engine.
//!
//! [`Real`] is the base floating-point type (`f32` or `f64`). [`Scalar`] is
//! anything that tensors can hold: plain reals, [`Jet`](crate::Jet)s carrying
//! coordinate derivatives, or [`Dual`](crate::Dual)s layered on either.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Field of numbers closed under the elementary functions used by catalog
/// metrics and Lagrangians.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn from_f64(v: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Leading real part, used for pivoting, guards and residual norms.
    fn value(&self) -> f64;

    /// True only when the number is known to be identically zero, including
    /// every derivative it carries.
    fn is_exact_zero(&self) -> bool;

    /// Largest absolute value over everything the number carries.
    fn max_abs(&self) -> f64;

    fn scale(&self, k: f64) -> Self;

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs
    }

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_exact_zero() || b.is_exact_zero() {
            return;
        }
        *self += a.mul_ref(b);
    }

    fn recip(&self) -> Self {
        Self::one() / self
    }

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;

    fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    fn square(&self) -> Self {
        self.mul_ref(self)
    }
}

/// Base floating-point type of jets.
pub trait Real: Float + FromPrimitive + Default + Debug + Send + Sync + 'static {}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn value(&self) -> f64 {
                *self as f64
            }
            #[inline]
            fn is_exact_zero(&self) -> bool {
                *self == 0.0
            }
            #[inline]
            fn max_abs(&self) -> f64 {
                (*self as f64).abs()
            }
            #[inline]
            fn scale(&self, k: f64) -> Self {
                *self * (k as $t)
            }
            #[inline]
            fn mul_ref(&self, rhs: &Self) -> Self {
                *self * *rhs
            }
            #[inline]
            fn mul_add_assign(&mut self, a: &Self, b: &Self) {
                *self += *a * *b;
            }
            fn exp(&self) -> Self {
                Float::exp(*self)
            }
            fn ln(&self) -> Self {
                Float::ln(*self)
            }
            fn sin(&self) -> Self {
                Float::sin(*self)
            }
            fn cos(&self) -> Self {
                Float::cos(*self)
            }
            fn sqrt(&self) -> Self {
                Float::sqrt(*self)
            }
            fn powi(&self, k: i32) -> Self {
                Float::powi(*self, k)
            }
        }

        impl Real for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_powi_matches_float() {
        fn via_trait<S: Scalar>(x: S, k: i32) -> S {
            let mut acc = S::one();
            for _ in 0..k.abs() {
                acc = acc * &x;
            }
            if k < 0 {
                acc.recip()
            } else {
                acc
            }
        }
        for k in -4..=6 {
            let a = via_trait(1.7f64, k);
            let b = Scalar::powi(&1.7f64, k);
            assert!((a - b).abs() <= 1e-12 * b.abs(), "k = {k}");
        }
    }

    #[test]
    fn f32_is_a_scalar() {
        let x: f32 = Scalar::from_f64(2.0);
        assert_eq!(Scalar::sqrt(&(x * x)), 2.0);
        assert_eq!(x.value(), 2.0);
    }
}
