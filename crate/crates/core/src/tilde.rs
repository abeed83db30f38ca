//! The tilde operator and the alternating symbol.
//!
//! For a type-(p,q) tensor `T`, `tilde(T)` is the type-(p+1,q+1) tensor
//!
//! ```text
//! T̃^{c1…cp}_{d1…dq}{}^a_b =  Σ_i T^{c1…a…cp}_{d1…dq} δ^{ci}_b
//!                         − Σ_j T^{c1…cp}_{d1…b…dq} δ^a_{dj}
//! ```
//!
//! where each term replaces one index. The two new slots are appended as
//! (up `a`, down `b`). Scalars map to the zero (1,1) tensor.

use crate::scalar::Scalar;
use crate::tensor::{Shape, Tensor, TensorError, Variance};

pub fn tilde<S: Scalar>(t: &Tensor<S>) -> Tensor<S> {
    let shape = t.shape().with_slot(Variance::Up).with_slot(Variance::Down);
    let r = t.rank();
    let slots = t.slots().to_vec();
    let mut src = vec![0usize; r];
    Tensor::from_fn(shape, |idx| {
        let (orig, new) = idx.split_at(r);
        let (a, b) = (new[0], new[1]);
        let mut acc = S::zero();
        for (s, v) in slots.iter().enumerate() {
            match v {
                Variance::Up if orig[s] == b => {
                    src.copy_from_slice(orig);
                    src[s] = a;
                    acc += &t[&src[..]];
                }
                Variance::Down if orig[s] == a => {
                    src.copy_from_slice(orig);
                    src[s] = b;
                    acc -= &t[&src[..]];
                }
                _ => {}
            }
        }
        acc
    })
}

/// `tilde(T⊗S) − tilde(T)⊗S − T⊗tilde(S)`, with the right-hand terms brought
/// to the slot order of the left. Identically zero.
pub fn tilde_product_rule_residual<S: Scalar>(
    t: &Tensor<S>,
    s: &Tensor<S>,
) -> Result<Tensor<S>, TensorError> {
    let lhs = tilde(&t.outer(s)?);
    let (rt, rs) = (t.rank(), s.rank());
    // tilde(T)⊗S has slots (T, a, b, S); reorder to (T, S, a, b)
    let mut perm: Vec<usize> = (0..rt).collect();
    perm.extend(rt + 2..rt + 2 + rs);
    perm.extend([rt, rt + 1]);
    let first = tilde(t).outer(s)?.permute(&perm)?;
    let second = t.outer(&tilde(s))?;
    lhs.try_sub(&first)?.try_sub(&second)
}

/// Totally antisymmetric symbol with all slots down and `ε_{01…(n−1)} = +1`.
pub fn levi_civita<S: Scalar>(dim: usize) -> Tensor<S> {
    let shape = Shape::new(dim, vec![Variance::Down; dim]).expect("nonzero dimension");
    Tensor::from_fn(shape, |idx| match permutation_sign(idx) {
        0 => S::zero(),
        s => S::from_f64(s as f64),
    })
}

/// Sign of `idx` as a permutation of `0..len`; zero on repeated entries.
pub fn permutation_sign(idx: &[usize]) -> i32 {
    let mut seen = vec![false; idx.len()];
    for &i in idx {
        if i >= idx.len() || seen[i] {
            return 0;
        }
        seen[i] = true;
    }
    let mut p = idx.to_vec();
    let mut sign = 1;
    for i in 0..p.len() {
        while p[i] != i {
            let j = p[i];
            p.swap(i, j);
            sign = -sign;
        }
    }
    sign
}
