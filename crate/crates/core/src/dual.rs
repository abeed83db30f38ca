//! First-order dual numbers over any [`Scalar`].
//!
//! `Dual<Jet<R>>` is how Lagrangians are differentiated with respect to a
//! single component argument while every coordinate derivative is kept.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::scalar::Scalar;

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Self { re, eps }
    }

    pub fn constant(re: S) -> Self {
        Self { re, eps: S::zero() }
    }

    /// Seeds the tangent direction.
    pub fn variable(re: S) -> Self {
        Self { re, eps: S::one() }
    }

    fn chain(&self, re: S, deriv: S) -> Self {
        let eps = if self.eps.is_exact_zero() {
            S::zero()
        } else {
            self.eps.mul_ref(&deriv)
        };
        Self { re, eps }
    }
}

impl<S: Scalar> Add<&Dual<S>> for Dual<S> {
    type Output = Dual<S>;
    fn add(mut self, rhs: &Dual<S>) -> Dual<S> {
        self.re += &rhs.re;
        self.eps += &rhs.eps;
        self
    }
}

impl<S: Scalar> Sub<&Dual<S>> for Dual<S> {
    type Output = Dual<S>;
    fn sub(mut self, rhs: &Dual<S>) -> Dual<S> {
        self.re -= &rhs.re;
        self.eps -= &rhs.eps;
        self
    }
}

impl<S: Scalar> Mul<&Dual<S>> for Dual<S> {
    type Output = Dual<S>;
    fn mul(self, rhs: &Dual<S>) -> Dual<S> {
        self.mul_ref(rhs)
    }
}

impl<S: Scalar> Div<&Dual<S>> for Dual<S> {
    type Output = Dual<S>;
    fn div(self, rhs: &Dual<S>) -> Dual<S> {
        let inv = rhs.re.recip();
        let re = self.re.mul_ref(&inv);
        // (a'b - ab') / b^2 = (a' - re·b') / b
        let mut num = self.eps;
        if !rhs.eps.is_exact_zero() {
            num -= re.mul_ref(&rhs.eps);
        }
        let eps = if num.is_exact_zero() {
            S::zero()
        } else {
            num * &inv
        };
        Dual { re, eps }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<Dual<S>> for Dual<S> {
            type Output = Dual<S>;
            fn $m(self, rhs: Dual<S>) -> Dual<S> {
                $tr::$m(self, &rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl<S: Scalar> Neg for Dual<S> {
    type Output = Dual<S>;
    fn neg(self) -> Dual<S> {
        Dual {
            re: -self.re,
            eps: -self.eps,
        }
    }
}

impl<S: Scalar> AddAssign<&Dual<S>> for Dual<S> {
    fn add_assign(&mut self, rhs: &Dual<S>) {
        self.re += &rhs.re;
        self.eps += &rhs.eps;
    }
}

impl<S: Scalar> SubAssign<&Dual<S>> for Dual<S> {
    fn sub_assign(&mut self, rhs: &Dual<S>) {
        self.re -= &rhs.re;
        self.eps -= &rhs.eps;
    }
}

impl<S: Scalar> AddAssign for Dual<S> {
    fn add_assign(&mut self, rhs: Dual<S>) {
        *self += &rhs;
    }
}

impl<S: Scalar> SubAssign for Dual<S> {
    fn sub_assign(&mut self, rhs: Dual<S>) {
        *self -= &rhs;
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(S::from_f64(v))
    }

    fn value(&self) -> f64 {
        self.re.value()
    }

    fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.eps.is_exact_zero()
    }

    fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.eps.max_abs())
    }

    fn scale(&self, k: f64) -> Self {
        Dual {
            re: self.re.scale(k),
            eps: self.eps.scale(k),
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let re = self.re.mul_ref(&rhs.re);
        let mut eps = S::zero();
        eps.mul_add_assign(&self.re, &rhs.eps);
        eps.mul_add_assign(&self.eps, &rhs.re);
        Dual { re, eps }
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re.mul_add_assign(&a.re, &b.re);
        self.eps.mul_add_assign(&a.re, &b.eps);
        self.eps.mul_add_assign(&a.eps, &b.re);
    }

    fn recip(&self) -> Self {
        let re = self.re.recip();
        let d = -re.square();
        self.chain(re, d)
    }

    fn exp(&self) -> Self {
        let e = self.re.exp();
        self.chain(e.clone(), e)
    }

    fn ln(&self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }

    fn sin(&self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }

    fn cos(&self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }

    fn sqrt(&self) -> Self {
        let s = self.re.sqrt();
        let d = s.recip().scale(0.5);
        self.chain(s, d)
    }

    fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::one();
        }
        let d = self.re.powi(k - 1).scale(k as f64);
        self.chain(self.re.powi(k), d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<S: Scalar>(x: &S) -> S {
        // x^2 sin(x) / (1 + x)
        x.square() * &x.sin() / &(S::one() + x)
    }

    #[test]
    fn derivative_matches_central_difference() {
        let x = 0.7f64;
        let d = f(&Dual::variable(x));
        let h = 1e-6;
        let fd = (f(&(x + h)) - f(&(x - h))) / (2.0 * h);
        assert!((d.re - f(&x)).abs() < 1e-15);
        assert!((d.eps - fd).abs() < 1e-8, "{} vs {}", d.eps, fd);
    }

    #[test]
    fn elementary_functions() {
        let x = Dual::variable(1.3f64);
        assert!((x.exp().eps - 1.3f64.exp()).abs() < 1e-14);
        assert!((x.ln().eps - 1.0 / 1.3).abs() < 1e-14);
        assert!((x.sqrt().eps - 0.5 / 1.3f64.sqrt()).abs() < 1e-14);
        assert!((x.cos().eps + 1.3f64.sin()).abs() < 1e-14);
        assert!((x.powi(-2).eps + 2.0 / 1.3f64.powi(3)).abs() < 1e-14);
    }
}
