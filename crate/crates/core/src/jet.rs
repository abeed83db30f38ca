//! Truncated multivariate Taylor expansions ("jets").
//!
//! A [`Jet`] holds the Taylor coefficients of a smooth function of the
//! coordinates about a base point, up to total degree `order`. Arithmetic and
//! the elementary functions propagate the coefficients exactly, so every
//! partial derivative up to `order` is available without truncation error.
//! Taking a partial derivative lowers the order by one.
//!
//! Coefficients are stored per monomial in graded order, so truncating to a
//! lower order is a prefix of the coefficient vector and mixed partials are
//! symmetric by construction.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::scalar::{Real, Scalar};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 6;
/// Highest supported number of jet variables.
pub const MAX_VARS: usize = 8;

const EXACT: usize = usize::MAX;

type Coeffs<R> = SmallVec<[R; 1]>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order must be between 1 and {MAX_ORDER}, got {0}")]
    InvalidOrder(usize),
    #[error("at most {MAX_VARS} jet variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("jet order exhausted: cannot differentiate an order-0 jet")]
    OrderExhausted,
    #[error("derivative of order {requested} requested from a jet of order {order}")]
    DerivativeTooHigh { requested: usize, order: usize },
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("{0} of a nonpositive value {1}")]
    NonPositive(&'static str, f64),
}

struct MonomialTable {
    /// `count_upto[k]` = number of monomials of degree <= k.
    count_upto: [usize; MAX_ORDER + 1],
    exps: Vec<[u8; MAX_VARS]>,
    /// (i, j, k): monomial i times monomial j is monomial k; sorted by degree of k.
    mul: Vec<(u16, u16, u16)>,
    mul_upto: [usize; MAX_ORDER + 1],
    /// `succ[a][i]` = index of monomial i times x_a, for degree(i) < MAX_ORDER.
    succ: Vec<Vec<u16>>,
}

impl MonomialTable {
    fn build(nvars: usize) -> Self {
        let mut exps: Vec<[u8; MAX_VARS]> = Vec::new();
        let mut count_upto = [0usize; MAX_ORDER + 1];
        for deg in 0..=MAX_ORDER {
            let mut cur = [0u8; MAX_VARS];
            push_degree(nvars, 0, deg, &mut cur, &mut exps);
            count_upto[deg] = exps.len();
        }
        let index_of = |e: &[u8; MAX_VARS]| -> Option<usize> {
            let d: usize = e.iter().map(|&v| v as usize).sum();
            if d > MAX_ORDER {
                return None;
            }
            let lo = if d == 0 { 0 } else { count_upto[d - 1] };
            let hi = count_upto[d];
            exps[lo..hi].iter().position(|x| x == e).map(|p| p + lo)
        };
        let degree = |i: usize| -> usize { exps[i].iter().map(|&v| v as usize).sum() };

        let mut mul = Vec::new();
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if degree(i) + degree(j) > MAX_ORDER {
                    continue;
                }
                let mut e = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    e[v] = exps[i][v] + exps[j][v];
                }
                let k = index_of(&e).expect("product monomial in table");
                mul.push((i as u16, j as u16, k as u16));
            }
        }
        mul.sort_by_key(|&(_, _, k)| (degree(k as usize), k));
        let mut mul_upto = [0usize; MAX_ORDER + 1];
        for (deg, slot) in mul_upto.iter_mut().enumerate() {
            *slot = mul
                .iter()
                .take_while(|&&(_, _, k)| degree(k as usize) <= deg)
                .count();
        }

        let mut succ = vec![Vec::new(); nvars];
        for (a, row) in succ.iter_mut().enumerate() {
            for i in 0..count_upto[MAX_ORDER - 1] {
                let mut e = exps[i];
                e[a] += 1;
                row.push(index_of(&e).expect("successor monomial in table") as u16);
            }
        }

        Self {
            count_upto,
            exps,
            mul,
            mul_upto,
            succ,
        }
    }
}

fn push_degree(
    nvars: usize,
    var: usize,
    remaining: usize,
    cur: &mut [u8; MAX_VARS],
    out: &mut Vec<[u8; MAX_VARS]>,
) {
    if nvars == 0 {
        if remaining == 0 {
            out.push(*cur);
        }
        return;
    }
    if var == nvars - 1 {
        cur[var] = remaining as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[var] = k as u8;
        push_degree(nvars, var + 1, remaining - k, cur, out);
    }
    cur[var] = 0;
}

fn table(nvars: usize) -> &'static MonomialTable {
    static TABLES: [OnceLock<MonomialTable>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];
    TABLES[nvars].get_or_init(|| MonomialTable::build(nvars))
}

/// Number of Taylor coefficients of an order-`order` jet in `nvars` variables.
pub fn coefficient_count(nvars: usize, order: usize) -> usize {
    table(nvars).count_upto[order.min(MAX_ORDER)]
}

/// Truncated Taylor expansion in `nvars` variables.
///
/// An *exact constant* carries a single coefficient and no order limit; it
/// combines with jets of any shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<R> {
    nvars: usize,
    order: usize,
    coeffs: Coeffs<R>,
}

impl<R: Real> Jet<R> {
    pub fn constant(v: R) -> Self {
        Self {
            nvars: 0,
            order: EXACT,
            coeffs: smallvec![v],
        }
    }

    /// The coordinate function `x_index` expanded about `value`.
    pub fn variable(nvars: usize, order: usize, index: usize, value: R) -> Result<Self, JetError> {
        check_shape(nvars, order)?;
        let t = table(nvars);
        let mut coeffs: Coeffs<R> = smallvec![R::zero(); t.count_upto[order]];
        coeffs[0] = value;
        coeffs[1 + index] = R::one();
        Ok(Self {
            nvars,
            order,
            coeffs,
        })
    }

    /// Jet from raw Taylor coefficients in graded monomial order.
    pub fn from_taylor(nvars: usize, order: usize, coeffs: Vec<R>) -> Result<Self, JetError> {
        check_shape(nvars, order)?;
        assert_eq!(coeffs.len(), coefficient_count(nvars, order));
        Ok(Self {
            nvars,
            order,
            coeffs: coeffs.into(),
        })
    }

    pub fn is_constant(&self) -> bool {
        self.order == EXACT
    }

    /// `None` for exact constants.
    pub fn order(&self) -> Option<usize> {
        (self.order != EXACT).then_some(self.order)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn real(&self) -> R {
        self.coeffs[0]
    }

    pub fn taylor(&self) -> &[R] {
        &self.coeffs
    }

    /// Exponent vector of the `i`-th Taylor coefficient.
    pub fn monomial(&self, i: usize) -> &[u8] {
        &table(self.nvars).exps[i][..self.nvars]
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn coefficient(&self, exponents: &[u8]) -> R {
        let deg: usize = exponents.iter().map(|&e| e as usize).sum();
        if deg == 0 {
            return self.coeffs[0];
        }
        if self.is_constant() || deg > self.order {
            return R::zero();
        }
        let t = table(self.nvars);
        let lo = t.count_upto[deg - 1];
        let hi = t.count_upto[deg];
        (lo..hi)
            .find(|&i| &t.exps[i][..self.nvars] == exponents)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(R::zero)
    }

    /// Mixed partial derivative `∂^m f / ∂x^{a1} … ∂x^{am}` at the base point.
    pub fn derivative(&self, indices: &[usize]) -> Result<R, JetError> {
        if indices.is_empty() {
            return Ok(self.coeffs[0]);
        }
        if self.is_constant() {
            return Ok(R::zero());
        }
        if indices.len() > self.order {
            return Err(JetError::DerivativeTooHigh {
                requested: indices.len(),
                order: self.order,
            });
        }
        let mut e = vec![0u8; self.nvars];
        for &a in indices {
            e[a] += 1;
        }
        let multiplicity: f64 = e.iter().map(|&k| factorial(k as usize)).product();
        Ok(self.coefficient(&e) * R::from_f64(multiplicity).unwrap())
    }

    /// Partial derivative with respect to variable `a`, one order lower.
    pub fn partial(&self, a: usize) -> Result<Self, JetError> {
        if self.is_constant() {
            return Ok(Self::constant(R::zero()));
        }
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        let t = table(self.nvars);
        let len = t.count_upto[self.order - 1];
        let succ = &t.succ[a];
        let coeffs = (0..len)
            .map(|i| {
                let k = succ[i] as usize;
                self.coeffs[k] * R::from_u8(t.exps[k][a]).unwrap()
            })
            .collect();
        Ok(Self {
            nvars: self.nvars,
            order: self.order - 1,
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if self.is_constant() || order >= self.order {
            return self.clone();
        }
        Self {
            nvars: self.nvars,
            order,
            coeffs: SmallVec::from_slice(&self.coeffs[..coefficient_count(self.nvars, order)]),
        }
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, JetError> {
        if rhs.real() == R::zero() {
            return Err(JetError::DivisionByZero);
        }
        Ok(self.clone() / rhs)
    }

    pub fn try_ln(&self) -> Result<Self, JetError> {
        if self.real() <= R::zero() {
            return Err(JetError::NonPositive("logarithm", self.real().to_f64().unwrap()));
        }
        Ok(Scalar::ln(self))
    }

    pub fn try_sqrt(&self) -> Result<Self, JetError> {
        if self.real() < R::zero() || (self.real() == R::zero() && !self.is_constant()) {
            return Err(JetError::NonPositive("square root", self.real().to_f64().unwrap()));
        }
        Ok(Scalar::sqrt(self))
    }

    fn zeros_like(nvars: usize, order: usize) -> Self {
        Self {
            nvars,
            order,
            coeffs: smallvec![R::zero(); coefficient_count(nvars, order)],
        }
    }

    /// Evaluates `Σ t_k h^k` where `h` is `self` minus its value.
    fn compose(&self, t: &[R]) -> Self {
        if self.is_constant() {
            return Self::constant(t[0]);
        }
        let mut h = self.clone();
        h.coeffs[0] = R::zero();
        let mut acc = Self::constant(t[t.len() - 1]);
        for &tk in t[..t.len() - 1].iter().rev() {
            acc = acc.mul_ref(&h);
            acc.coeffs[0] = acc.coeffs[0] + tk;
        }
        acc
    }

    fn terms(&self) -> usize {
        if self.is_constant() {
            1
        } else {
            self.order + 1
        }
    }

    /// `self += k * other`
    fn add_scaled(&mut self, other: &Self, k: R) {
        if other.is_constant() {
            self.coeffs[0] = self.coeffs[0] + k * other.coeffs[0];
            return;
        }
        self.absorb_shape(other.nvars, other.order);
        let len = self.coeffs.len();
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs[..len]) {
            *c = *c + k * *o;
        }
    }

    /// Ensures `self` is a jet of the given shape, truncating to the lower order.
    fn absorb_shape(&mut self, nvars: usize, order: usize) {
        if self.is_constant() {
            let c = self.coeffs[0];
            *self = Self::zeros_like(nvars, order);
            self.coeffs[0] = c;
        } else {
            debug_assert_eq!(self.nvars, nvars, "jets over different variable sets");
            if order < self.order {
                self.order = order;
                self.coeffs.truncate(coefficient_count(nvars, order));
            }
        }
    }
}

fn check_shape(nvars: usize, order: usize) -> Result<(), JetError> {
    if nvars > MAX_VARS {
        return Err(JetError::TooManyVariables(nvars));
    }
    if order > MAX_ORDER {
        return Err(JetError::InvalidOrder(order));
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Seeds the coordinate functions `x^a` at `point` as jets of the given order.
pub fn lift<R: Real>(point: &[R], order: usize) -> Result<Vec<Jet<R>>, JetError> {
    if order < 1 || order > MAX_ORDER {
        return Err(JetError::InvalidOrder(order));
    }
    let n = point.len();
    (0..n)
        .map(|a| Jet::variable(n, order, a, point[a]))
        .collect()
}

impl<R: Real> Add<&Jet<R>> for Jet<R> {
    type Output = Jet<R>;
    fn add(mut self, rhs: &Jet<R>) -> Jet<R> {
        self.add_scaled(rhs, R::one());
        self
    }
}

impl<R: Real> Sub<&Jet<R>> for Jet<R> {
    type Output = Jet<R>;
    fn sub(mut self, rhs: &Jet<R>) -> Jet<R> {
        self.add_scaled(rhs, -R::one());
        self
    }
}

impl<R: Real> Mul<&Jet<R>> for Jet<R> {
    type Output = Jet<R>;
    fn mul(self, rhs: &Jet<R>) -> Jet<R> {
        self.mul_ref(rhs)
    }
}

impl<R: Real> Div<&Jet<R>> for Jet<R> {
    type Output = Jet<R>;
    fn div(self, rhs: &Jet<R>) -> Jet<R> {
        if rhs.is_constant() {
            return self.scale_real(R::one() / rhs.coeffs[0]);
        }
        self.mul_ref(&rhs.recip())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<R: Real> $tr<Jet<R>> for Jet<R> {
            type Output = Jet<R>;
            fn $m(self, rhs: Jet<R>) -> Jet<R> {
                $tr::$m(self, &rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl<R: Real> Neg for Jet<R> {
    type Output = Jet<R>;
    fn neg(mut self) -> Jet<R> {
        for c in &mut self.coeffs {
            *c = -*c;
        }
        self
    }
}

impl<R: Real> AddAssign<&Jet<R>> for Jet<R> {
    fn add_assign(&mut self, rhs: &Jet<R>) {
        self.add_scaled(rhs, R::one());
    }
}

impl<R: Real> SubAssign<&Jet<R>> for Jet<R> {
    fn sub_assign(&mut self, rhs: &Jet<R>) {
        self.add_scaled(rhs, -R::one());
    }
}

impl<R: Real> AddAssign for Jet<R> {
    fn add_assign(&mut self, rhs: Jet<R>) {
        self.add_scaled(&rhs, R::one());
    }
}

impl<R: Real> SubAssign for Jet<R> {
    fn sub_assign(&mut self, rhs: Jet<R>) {
        self.add_scaled(&rhs, -R::one());
    }
}

impl<R: Real> Jet<R> {
    fn scale_real(mut self, k: R) -> Self {
        if k == R::zero() {
            return Self::constant(R::zero());
        }
        for c in &mut self.coeffs {
            *c = *c * k;
        }
        self
    }
}

impl<R: Real> Scalar for Jet<R> {
    fn from_f64(v: f64) -> Self {
        Jet::constant(R::from_f64(v).unwrap())
    }

    fn value(&self) -> f64 {
        self.coeffs[0].to_f64().unwrap()
    }

    fn is_exact_zero(&self) -> bool {
        self.is_constant() && self.coeffs[0] == R::zero()
    }

    fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.to_f64().unwrap().abs()))
    }

    fn scale(&self, k: f64) -> Self {
        self.clone().scale_real(R::from_f64(k).unwrap())
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        match (self.is_constant(), rhs.is_constant()) {
            (true, true) => Jet::constant(self.coeffs[0] * rhs.coeffs[0]),
            (true, false) => rhs.clone().scale_real(self.coeffs[0]),
            (false, true) => self.clone().scale_real(rhs.coeffs[0]),
            (false, false) => {
                debug_assert_eq!(self.nvars, rhs.nvars, "jets over different variable sets");
                let order = self.order.min(rhs.order);
                let t = table(self.nvars);
                let mut out: Coeffs<R> = smallvec![R::zero(); t.count_upto[order]];
                let a = &self.coeffs;
                let b = &rhs.coeffs;
                for &(i, j, k) in &t.mul[..t.mul_upto[order]] {
                    out[k as usize] = out[k as usize] + a[i as usize] * b[j as usize];
                }
                Jet {
                    nvars: self.nvars,
                    order,
                    coeffs: out,
                }
            }
        }
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_exact_zero() || b.is_exact_zero() {
            return;
        }
        match (a.is_constant(), b.is_constant()) {
            (true, true) => self.coeffs[0] = self.coeffs[0] + a.coeffs[0] * b.coeffs[0],
            (true, false) => self.add_scaled(b, a.coeffs[0]),
            (false, true) => self.add_scaled(a, b.coeffs[0]),
            (false, false) => {
                let order = a.order.min(b.order);
                self.absorb_shape(a.nvars, order);
                let t = table(a.nvars);
                let out = &mut self.coeffs;
                let (x, y) = (&a.coeffs, &b.coeffs);
                for &(i, j, k) in &t.mul[..t.mul_upto[self.order]] {
                    out[k as usize] = out[k as usize] + x[i as usize] * y[j as usize];
                }
            }
        }
    }

    fn recip(&self) -> Self {
        let c = self.coeffs[0];
        let inv = R::one() / c;
        let mut t = Vec::with_capacity(self.terms());
        let mut p = inv;
        for _ in 0..self.terms() {
            t.push(p);
            p = -p * inv;
        }
        self.compose(&t)
    }

    fn exp(&self) -> Self {
        let e = self.coeffs[0].exp();
        let t: Vec<R> = (0..self.terms())
            .map(|k| e / R::from_f64(factorial(k)).unwrap())
            .collect();
        self.compose(&t)
    }

    fn ln(&self) -> Self {
        let c = self.coeffs[0];
        let mut t = vec![c.ln()];
        let inv = R::one() / c;
        let mut p = inv;
        for k in 1..self.terms() {
            let sign = if k % 2 == 1 { R::one() } else { -R::one() };
            t.push(sign * p / R::from_usize(k).unwrap());
            p = p * inv;
        }
        self.compose(&t)
    }

    fn sin(&self) -> Self {
        let (s, c) = (self.coeffs[0].sin(), self.coeffs[0].cos());
        let cycle = [s, c, -s, -c];
        let t: Vec<R> = (0..self.terms())
            .map(|k| cycle[k % 4] / R::from_f64(factorial(k)).unwrap())
            .collect();
        self.compose(&t)
    }

    fn cos(&self) -> Self {
        let (s, c) = (self.coeffs[0].sin(), self.coeffs[0].cos());
        let cycle = [c, -s, -c, s];
        let t: Vec<R> = (0..self.terms())
            .map(|k| cycle[k % 4] / R::from_f64(factorial(k)).unwrap())
            .collect();
        self.compose(&t)
    }

    fn sqrt(&self) -> Self {
        let c = self.coeffs[0];
        let half = R::from_f64(0.5).unwrap();
        let root = c.sqrt();
        // binom(1/2, k) c^{1/2 - k}
        let mut t = vec![root];
        let mut binom = R::one();
        let mut p = root;
        let inv = R::one() / c;
        for k in 1..self.terms() {
            let kk = R::from_usize(k).unwrap();
            binom = binom * (half - kk + R::one()) / kk;
            p = p * inv;
            t.push(binom * p);
        }
        self.compose(&t)
    }
}
