//! Dense multi-index tensors at a single point.
//!
//! Components are stored row-major over the slots in declared order. Each slot
//! carries its variance; operations that pair slots check it.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

impl Variance {
    pub fn dual(self) -> Self {
        match self {
            Variance::Up => Variance::Down,
            Variance::Down => Variance::Up,
        }
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variance::Up => "up",
            Variance::Down => "down",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("slot {slot} out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slots {0} and {1} must have opposite variance ({2} vs {3})")]
    VarianceMismatch(usize, usize, Variance, Variance),
    #[error("slots {0} and {1} must have the same variance to be (anti)symmetrized")]
    SymmetrizationVariance(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected {expected} components, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(String, String),
    #[error("manifold dimension must be at least 1")]
    ZeroDimension,
    #[error("a metric must be a (0,2) tensor, an inverse metric a (2,0) tensor")]
    NotAMetric,
    #[error("slot permutation {0:?} is invalid")]
    BadPermutation(Vec<usize>),
}

/// Manifold dimension plus the variance of every slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dim: usize,
    slots: Vec<Variance>,
}

impl Shape {
    pub fn new(dim: usize, slots: Vec<Variance>) -> Result<Self, TensorError> {
        if dim == 0 {
            return Err(TensorError::ZeroDimension);
        }
        Ok(Self { dim, slots })
    }

    pub fn scalar(dim: usize) -> Self {
        Self::new(dim, Vec::new()).expect("nonzero dimension")
    }

    /// `p` up-slots followed by `q` down-slots.
    pub fn pq(dim: usize, p: usize, q: usize) -> Self {
        let mut slots = vec![Variance::Up; p];
        slots.extend(std::iter::repeat(Variance::Down).take(q));
        Self::new(dim, slots).expect("nonzero dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Variance] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    /// Number of contravariant slots.
    pub fn p(&self) -> usize {
        self.slots.iter().filter(|v| **v == Variance::Up).count()
    }

    /// Number of covariant slots.
    pub fn q(&self) -> usize {
        self.rank() - self.p()
    }

    pub fn len(&self) -> usize {
        self.dim.pow(self.rank() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_slot(&self, v: Variance) -> Self {
        let mut slots = self.slots.clone();
        slots.push(v);
        Self {
            dim: self.dim,
            slots,
        }
    }

    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            slots: self.slots.iter().map(|v| v.dual()).collect(),
        }
    }

    pub fn strides(&self) -> Vec<usize> {
        let r = self.rank();
        let mut s = vec![1; r];
        for i in (0..r.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dim;
        }
        s
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in (0..self.rank()).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}) n={} [", self.p(), self.q(), self.dim)?;
        for (i, v) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    shape: Shape,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(shape: Shape) -> Self {
        let data = vec![S::zero(); shape.len()];
        Self { shape, data }
    }

    pub fn from_vec(shape: Shape, data: Vec<S>) -> Result<Self, TensorError> {
        if data.len() != shape.len() {
            return Err(TensorError::LengthMismatch {
                expected: shape.len(),
                got: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let mut idx = vec![0; shape.rank()];
        let data = (0..shape.len())
            .map(|flat| {
                shape.unravel(flat, &mut idx);
                f(&idx)
            })
            .collect();
        Self { shape, data }
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        Self {
            shape: Shape::scalar(dim),
            data: vec![value],
        }
    }

    /// Kronecker delta δ^a_b.
    pub fn delta(dim: usize) -> Self {
        Self::from_fn(Shape::pq(dim, 1, 1), |i| {
            if i[0] == i[1] {
                S::one()
            } else {
                S::zero()
            }
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim
    }

    pub fn rank(&self) -> usize {
        self.shape.rank()
    }

    pub fn slots(&self) -> &[Variance] {
        &self.shape.slots
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    /// The single component of a rank-0 tensor.
    pub fn as_scalar(&self) -> &S {
        assert_eq!(self.rank(), 0, "not a rank-0 tensor");
        &self.data[0]
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<T: Scalar, E>(&self, f: impl FnMut(&S) -> Result<T, E>) -> Result<Tensor<T>, E> {
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|s| s.scale(k))
    }

    /// Multiplies every component by a scalar of the same kind.
    pub fn scale_by(&self, k: &S) -> Self {
        self.map(|s| s.mul_ref(k))
    }

    /// Largest absolute point value over all components.
    pub fn max_abs_value(&self) -> f64 {
        self.data.iter().fold(0.0, |m, s| m.max(s.value().abs()))
    }

    /// Point values of every component.
    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(|s| s.value()).collect()
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(
                self.shape.to_string(),
                other.shape.to_string(),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        })
    }

    /// Tensor product; slots of `self` first.
    pub fn outer(&self, other: &Self) -> Result<Self, TensorError> {
        if self.dim() != other.dim() {
            return Err(TensorError::DimensionMismatch(self.dim(), other.dim()));
        }
        let mut slots = self.shape.slots.clone();
        slots.extend_from_slice(&other.shape.slots);
        let shape = Shape::new(self.dim(), slots)?;
        let mut data = Vec::with_capacity(shape.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a.mul_ref(b));
            }
        }
        Ok(Tensor { shape, data })
    }

    fn check_slot(&self, slot: usize) -> Result<(), TensorError> {
        if slot >= self.rank() {
            return Err(TensorError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            });
        }
        Ok(())
    }

    /// Generalized contraction: sums over each `(slot of self, slot of other)`
    /// pair. Paired slots must have opposite variance. The result carries the
    /// free slots of `self` followed by the free slots of `other`.
    pub fn tensordot(&self, other: &Self, pairs: &[(usize, usize)]) -> Result<Self, TensorError> {
        if self.dim() != other.dim() {
            return Err(TensorError::DimensionMismatch(self.dim(), other.dim()));
        }
        for &(i, j) in pairs {
            self.check_slot(i)?;
            other.check_slot(j)?;
            let (vi, vj) = (self.slots()[i], other.slots()[j]);
            if vi == vj {
                return Err(TensorError::VarianceMismatch(i, j, vi, vj));
            }
        }
        let n = self.dim();
        let sa = self.shape.strides();
        let sb = other.shape.strides();
        let free_a: Vec<usize> = (0..self.rank())
            .filter(|s| !pairs.iter().any(|p| p.0 == *s))
            .collect();
        let free_b: Vec<usize> = (0..other.rank())
            .filter(|s| !pairs.iter().any(|p| p.1 == *s))
            .collect();
        let mut slots: Vec<Variance> = free_a.iter().map(|&s| self.slots()[s]).collect();
        slots.extend(free_b.iter().map(|&s| other.slots()[s]));
        let shape = Shape::new(n, slots)?;

        // offsets of every contracted index combination
        let combos = n.pow(pairs.len() as u32);
        let mut offs = Vec::with_capacity(combos);
        let mut cidx = vec![0usize; pairs.len()];
        for c in 0..combos {
            let mut rem = c;
            for k in (0..pairs.len()).rev() {
                cidx[k] = rem % n;
                rem /= n;
            }
            let oa: usize = pairs.iter().zip(&cidx).map(|(p, &i)| sa[p.0] * i).sum();
            let ob: usize = pairs.iter().zip(&cidx).map(|(p, &i)| sb[p.1] * i).sum();
            offs.push((oa, ob));
        }

        let mut idx = vec![0usize; shape.rank()];
        let data = (0..shape.len())
            .map(|flat| {
                shape.unravel(flat, &mut idx);
                let ba: usize = free_a.iter().zip(&idx).map(|(&s, &i)| sa[s] * i).sum();
                let bb: usize = free_b
                    .iter()
                    .zip(&idx[free_a.len()..])
                    .map(|(&s, &i)| sb[s] * i)
                    .sum();
                let mut acc = S::zero();
                for &(oa, ob) in &offs {
                    acc.mul_add_assign(&self.data[ba + oa], &other.data[bb + ob]);
                }
                acc
            })
            .collect();
        Ok(Tensor { shape, data })
    }

    /// Trace over one up-slot and one down-slot.
    pub fn contract(&self, a: usize, b: usize) -> Result<Self, TensorError> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        let (va, vb) = (self.slots()[a], self.slots()[b]);
        if va == vb || a == b {
            return Err(TensorError::VarianceMismatch(a, b, va, vb));
        }
        let n = self.dim();
        let strides = self.shape.strides();
        let free: Vec<usize> = (0..self.rank()).filter(|s| *s != a && *s != b).collect();
        let shape = Shape::new(n, free.iter().map(|&s| self.slots()[s]).collect())?;
        let mut idx = vec![0usize; shape.rank()];
        let data = (0..shape.len())
            .map(|flat| {
                shape.unravel(flat, &mut idx);
                let base: usize = free.iter().zip(&idx).map(|(&s, &i)| strides[s] * i).sum();
                let mut acc = S::zero();
                for k in 0..n {
                    acc += &self.data[base + k * (strides[a] + strides[b])];
                }
                acc
            })
            .collect();
        Ok(Tensor { shape, data })
    }

    /// Reorders slots: slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, TensorError> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::BadPermutation(perm.to_vec()));
        }
        let strides = self.shape.strides();
        let shape = Shape::new(self.dim(), perm.iter().map(|&p| self.slots()[p]).collect())?;
        let mut idx = vec![0usize; r];
        let data = (0..shape.len())
            .map(|flat| {
                shape.unravel(flat, &mut idx);
                let src: usize = perm.iter().zip(&idx).map(|(&p, &i)| strides[p] * i).sum();
                self.data[src].clone()
            })
            .collect();
        Ok(Tensor { shape, data })
    }

    /// Swaps two slots.
    pub fn transpose(&self, a: usize, b: usize) -> Result<Self, TensorError> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Moves the last slot to position `slot`.
    fn last_to(&self, slot: usize) -> Result<Self, TensorError> {
        let r = self.rank();
        let mut perm: Vec<usize> = (0..r - 1).collect();
        perm.insert(slot, r - 1);
        self.permute(&perm)
    }

    /// Raises a down-slot in place with the inverse metric `g^{ab}`.
    pub fn raise(&self, slot: usize, inverse_metric: &Self) -> Result<Self, TensorError> {
        self.check_slot(slot)?;
        if inverse_metric.slots() != [Variance::Up, Variance::Up] {
            return Err(TensorError::NotAMetric);
        }
        self.tensordot_then_restore(slot, inverse_metric)
    }

    /// Lowers an up-slot in place with the metric `g_{ab}`.
    pub fn lower(&self, slot: usize, metric: &Self) -> Result<Self, TensorError> {
        self.check_slot(slot)?;
        if metric.slots() != [Variance::Down, Variance::Down] {
            return Err(TensorError::NotAMetric);
        }
        self.tensordot_then_restore(slot, metric)
    }

    fn tensordot_then_restore(&self, slot: usize, m: &Self) -> Result<Self, TensorError> {
        self.tensordot(m, &[(slot, 0)])?.last_to(slot)
    }

    fn check_pair_variance(&self, a: usize, b: usize) -> Result<(), TensorError> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        if self.slots()[a] != self.slots()[b] {
            return Err(TensorError::SymmetrizationVariance(a, b));
        }
        Ok(())
    }

    /// `½ (T + T with slots a, b swapped)`
    pub fn symmetrize(&self, a: usize, b: usize) -> Result<Self, TensorError> {
        self.check_pair_variance(a, b)?;
        Ok(self.try_add(&self.transpose(a, b)?)?.scale(0.5))
    }

    /// `½ (T − T with slots a, b swapped)`
    pub fn antisymmetrize(&self, a: usize, b: usize) -> Result<Self, TensorError> {
        self.check_pair_variance(a, b)?;
        Ok(self.try_sub(&self.transpose(a, b)?)?.scale(0.5))
    }

    /// Applies an index-algebra descriptor.
    pub fn apply(&self, op: &IndexOp<S>) -> Result<Self, TensorError> {
        match op {
            IndexOp::Product(other) => self.outer(other),
            IndexOp::Contract { up, down } => self.contract(*up, *down),
            IndexOp::Raise { slot, inverse } => self.raise(*slot, inverse),
            IndexOp::Lower { slot, metric } => self.lower(*slot, metric),
            IndexOp::Symmetrize(a, b) => self.symmetrize(*a, *b),
            IndexOp::Antisymmetrize(a, b) => self.antisymmetrize(*a, *b),
            IndexOp::Permute(p) => self.permute(p),
        }
    }
}

/// Explicit slot bookkeeping for [`Tensor::apply`].
#[derive(Clone, Debug)]
pub enum IndexOp<S> {
    Product(Tensor<S>),
    Contract { up: usize, down: usize },
    Raise { slot: usize, inverse: Tensor<S> },
    Lower { slot: usize, metric: Tensor<S> },
    Symmetrize(usize, usize),
    Antisymmetrize(usize, usize),
    Permute(Vec<usize>),
}

impl<S> Index<&[usize]> for Tensor<S> {
    type Output = S;
    fn index(&self, idx: &[usize]) -> &S {
        &self.data[self.shape.flat(idx)]
    }
}

impl<S> IndexMut<&[usize]> for Tensor<S> {
    fn index_mut(&mut self, idx: &[usize]) -> &mut S {
        let f = self.shape.flat(idx);
        &mut self.data[f]
    }
}

impl<const N: usize, S> Index<[usize; N]> for Tensor<S> {
    type Output = S;
    fn index(&self, idx: [usize; N]) -> &S {
        &self.data[self.shape.flat(&idx)]
    }
}

impl<const N: usize, S> IndexMut<[usize; N]> for Tensor<S> {
    fn index_mut(&mut self, idx: [usize; N]) -> &mut S {
        let f = self.shape.flat(&idx);
        &mut self.data[f]
    }
}

/// Panics on shape mismatch; use [`Tensor::try_add`] for a checked sum.
impl<S: Scalar> Add<&Tensor<S>> for &Tensor<S> {
    type Output = Tensor<S>;
    fn add(self, rhs: &Tensor<S>) -> Tensor<S> {
        self.try_add(rhs).expect("tensor shapes must match")
    }
}

/// Panics on shape mismatch; use [`Tensor::try_sub`] for a checked difference.
impl<S: Scalar> Sub<&Tensor<S>> for &Tensor<S> {
    type Output = Tensor<S>;
    fn sub(self, rhs: &Tensor<S>) -> Tensor<S> {
        self.try_sub(rhs).expect("tensor shapes must match")
    }
}

impl<S: Scalar> Neg for &Tensor<S> {
    type Output = Tensor<S>;
    fn neg(self) -> Tensor<S> {
        self.map(|s| -s.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Variance::{Down, Up};

    fn metric3() -> Tensor<f64> {
        let g = [[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.1]];
        Tensor::from_fn(Shape::pq(3, 0, 2), |i| g[i[0]][i[1]])
    }

    fn inverse3(g: &Tensor<f64>) -> Tensor<f64> {
        let m: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| g[[i, j]]).collect()).collect();
        let inv = crate::linalg::invert(&m).unwrap();
        Tensor::from_fn(Shape::pq(3, 2, 0), |i| inv[i[0]][i[1]])
    }

    #[test]
    fn trace_of_delta() {
        let d = Tensor::<f64>::delta(4);
        assert_eq!(*d.contract(0, 1).unwrap().as_scalar(), 4.0);
    }

    #[test]
    fn raise_lower_roundtrip() {
        let g = metric3();
        let ginv = inverse3(&g);
        let t = Tensor::from_fn(Shape::new(3, vec![Up, Down, Up]).unwrap(), |i| {
            (i[0] * 9 + i[1] * 3 + i[2]) as f64 * 0.37 - 2.0
        });
        let back = t.lower(2, &g).unwrap().raise(2, &ginv).unwrap();
        assert_eq!(back.slots(), t.slots());
        assert!((&back - &t).max_abs_value() < 1e-14);
    }

    #[test]
    fn antisymmetrize_symmetric_pair_vanishes() {
        let g = metric3();
        assert_eq!(g.antisymmetrize(0, 1).unwrap().max_abs_value(), 0.0);
        assert!((&g.symmetrize(0, 1).unwrap() - &g).max_abs_value() == 0.0);
    }

    #[test]
    fn errors() {
        let d = Tensor::<f64>::delta(3);
        assert!(matches!(
            d.tensordot(&d, &[(0, 0)]),
            Err(TensorError::VarianceMismatch(..))
        ));
        assert!(matches!(d.symmetrize(0, 1), Err(TensorError::SymmetrizationVariance(..))));
        assert!(matches!(
            d.outer(&Tensor::delta(2)),
            Err(TensorError::DimensionMismatch(3, 2))
        ));
        assert!(matches!(d.raise(1, &d), Err(TensorError::NotAMetric)));
        assert!(matches!(d.contract(0, 5), Err(TensorError::SlotOutOfRange { .. })));
        assert!(Shape::new(0, vec![]).is_err());
    }

    #[test]
    fn tensordot_matches_outer_then_contract() {
        let a = Tensor::from_fn(Shape::new(3, vec![Up, Down]).unwrap(), |i| (i[0] + 2 * i[1]) as f64);
        let b = Tensor::from_fn(Shape::new(3, vec![Up, Up]).unwrap(), |i| (3 * i[0] + i[1]) as f64 - 1.0);
        let direct = a.tensordot(&b, &[(1, 0)]).unwrap();
        let via = a.outer(&b).unwrap().contract(2, 1).unwrap();
        assert_eq!(direct, via);
    }
}
