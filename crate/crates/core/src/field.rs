//! Lagrangian theories of tensor fields and the energy-momentum tensors built
//! from them.
//!
//! A Lagrangian is written once, generically over [`Scalar`]. Evaluating it on
//! `Dual<Jet>` arguments, one component seeded at a time, yields
//! `∂L/∂(∇ψ)`, `∂L/∂ψ` and `∂L/∂g` as jets, so they can be differentiated
//! further along spacetime.
//!
//! Slot layouts: `∇ψ` carries the field slots then the derivative slot;
//! `P = ∂L/∂(∇ψ)` carries the dual field slots then the up slot `a`.

use thiserror::Error;

use crate::dual::Dual;
use crate::geometry::{gradient, GeometryError, GeometryPoint};
use crate::jet::Jet;
use crate::linalg;
use crate::scalar::{Real, Scalar};
use crate::tensor::{Shape, Tensor, TensorError};
use crate::tilde::tilde;

/// Largest EOM residual accepted by on-shell checks.
pub const ON_SHELL_GATE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("field content mismatch: expected {expected}, got {got}")]
    Content { expected: String, got: String },
    #[error("configuration is off-shell (EOM residual {0:e})")]
    OffShell(f64),
    #[error("vector field is not Killing (residual {0:e})")]
    NotKilling(f64),
}

impl From<TensorError> for FieldError {
    fn from(e: TensorError) -> Self {
        FieldError::Geometry(e.into())
    }
}

impl From<crate::jet::JetError> for FieldError {
    fn from(e: crate::jet::JetError) -> Self {
        FieldError::Geometry(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSlot {
    pub label: &'static str,
    pub shape: Shape,
}

/// Arguments of `L(∇ψ, ψ, g)`.
pub struct LagrangianArgs<'a, S> {
    pub grad: &'a [Tensor<S>],
    pub fields: &'a [Tensor<S>],
    pub metric: &'a Tensor<S>,
    /// Bare coordinates. A well-formed scalar Lagrangian ignores them.
    pub coords: &'a [S],
}

pub trait Lagrangian: Send + Sync {
    fn content(&self, dim: usize) -> Vec<FieldSlot>;

    fn density<S: Scalar>(&self, args: &LagrangianArgs<'_, S>) -> S;
}

/// Field values as functions of the coordinates, one tensor per label.
pub trait FieldConfiguration: Send + Sync {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<Tensor<S>>;
}

/// Built-in theories.
#[derive(Clone, Debug, PartialEq)]
pub enum Theory {
    /// `L = −½(g^{ab}∇_aφ∇_bφ + m²φ²)`
    Scalar { mass: f64 },
    /// `L = −¼F_{ab}F^{ab}`, `F_{ab} = ∇_aA_b − ∇_bA_a`
    Maxwell,
    /// Massless scalar plus `x⁰φ²`; not a scalar function of its arguments.
    BrokenScalar,
}

impl Theory {
    pub fn name(&self) -> &'static str {
        match self {
            Theory::Scalar { .. } => "scalar",
            Theory::Maxwell => "maxwell",
            Theory::BrokenScalar => "broken-scalar",
        }
    }
}

pub fn inverse_metric<S: Scalar>(g: &Tensor<S>) -> Tensor<S> {
    let n = g.dim();
    let rows: Vec<Vec<S>> = (0..n)
        .map(|a| (0..n).map(|b| g[[a, b]].clone()).collect())
        .collect();
    let inv = linalg::invert(&rows).expect("singular metric");
    Tensor::from_fn(Shape::pq(n, 2, 0), |i| inv[i[0]][i[1]].clone())
}

fn scalar_kinetic<S: Scalar>(ginv: &Tensor<S>, d: &Tensor<S>) -> S {
    let n = d.dim();
    let mut kin = S::zero();
    for a in 0..n {
        let mut row = S::zero();
        for b in 0..n {
            row.mul_add_assign(&ginv[[a, b]], &d[[b]]);
        }
        kin.mul_add_assign(&row, &d[[a]]);
    }
    kin
}

/// `F_{ab}` from `grad[b, a] = ∇_a A_b`.
pub fn field_strength<S: Scalar>(grad: &Tensor<S>) -> Tensor<S> {
    Tensor::from_fn(Shape::pq(grad.dim(), 0, 2), |i| {
        grad[[i[1], i[0]]].clone() - &grad[[i[0], i[1]]]
    })
}

fn maxwell_density<S: Scalar>(ginv: &Tensor<S>, f: &Tensor<S>) -> S {
    let n = f.dim();
    // m[a][d] = F^a_d;  F_{ab}F^{ab} = −tr(m²)
    let mut m = vec![vec![S::zero(); n]; n];
    for (a, row) in m.iter_mut().enumerate() {
        for (d, entry) in row.iter_mut().enumerate() {
            for c in 0..n {
                entry.mul_add_assign(&ginv[[a, c]], &f[[c, d]]);
            }
        }
    }
    let mut tr = S::zero();
    for a in 0..n {
        for d in 0..n {
            tr.mul_add_assign(&m[a][d], &m[d][a]);
        }
    }
    tr.scale(0.25)
}

impl Lagrangian for Theory {
    fn content(&self, dim: usize) -> Vec<FieldSlot> {
        match self {
            Theory::Scalar { .. } | Theory::BrokenScalar => vec![FieldSlot {
                label: "phi",
                shape: Shape::scalar(dim),
            }],
            Theory::Maxwell => vec![FieldSlot {
                label: "A",
                shape: Shape::pq(dim, 0, 1),
            }],
        }
    }

    fn density<S: Scalar>(&self, args: &LagrangianArgs<'_, S>) -> S {
        let ginv = inverse_metric(args.metric);
        match self {
            Theory::Scalar { mass } => {
                let phi = args.fields[0].as_scalar();
                let kin = scalar_kinetic(&ginv, &args.grad[0]);
                (kin + phi.square().scale(mass * mass)).scale(-0.5)
            }
            Theory::Maxwell => maxwell_density(&ginv, &field_strength(&args.grad[0])),
            Theory::BrokenScalar => {
                let phi = args.fields[0].as_scalar();
                let kin = scalar_kinetic(&ginv, &args.grad[0]);
                kin.scale(-0.5) + args.coords[0].mul_ref(&phi.square())
            }
        }
    }
}

/// Fields and their covariant derivatives at one point.
#[derive(Clone, Debug)]
pub struct FieldPoint<R> {
    pub coords: Vec<Jet<R>>,
    pub fields: Vec<Tensor<Jet<R>>>,
    pub grads: Vec<Tensor<Jet<R>>>,
}

impl<R: Real> FieldPoint<R> {
    pub fn new<L: Lagrangian>(
        lagrangian: &L,
        geo: &GeometryPoint<R>,
        coords: Vec<Jet<R>>,
        fields: Vec<Tensor<Jet<R>>>,
    ) -> Result<Self, FieldError> {
        let content = lagrangian.content(geo.dim());
        let shapes: Vec<&Shape> = fields.iter().map(|f| f.shape()).collect();
        if content.len() != fields.len() || content.iter().zip(&shapes).any(|(c, s)| &c.shape != *s) {
            let fmt = |v: Vec<String>| v.join(", ");
            return Err(FieldError::Content {
                expected: fmt(content.iter().map(|c| format!("{}:{}", c.label, c.shape)).collect()),
                got: fmt(shapes.iter().map(|s| s.to_string()).collect()),
            });
        }
        let grads = fields
            .iter()
            .map(|f| geo.covariant_derivative(f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            coords,
            fields,
            grads,
        })
    }

    /// Same fields with `∇ψ` raised on its derivative slot.
    fn grads_up(&self, geo: &GeometryPoint<R>) -> Result<Vec<Tensor<Jet<R>>>, FieldError> {
        self.grads
            .iter()
            .map(|g| Ok(geo.raise(g, g.rank() - 1)?))
            .collect()
    }

    /// `ψ̃^{cd}` with the tilde's down slot raised.
    fn tildes_up(&self, geo: &GeometryPoint<R>) -> Result<Vec<Tensor<Jet<R>>>, FieldError> {
        self.fields
            .iter()
            .map(|f| Ok(geo.raise(&tilde(f), f.rank() + 1)?))
            .collect()
    }
}

/// Partial derivatives of `L` with respect to its component arguments.
#[derive(Clone, Debug)]
pub struct Derivatives<R> {
    pub value: Jet<R>,
    /// `∂L/∂(∇_aψ)`
    pub d_grad: Vec<Tensor<Jet<R>>>,
    /// `∂L/∂ψ`
    pub d_field: Vec<Tensor<Jet<R>>>,
    /// `∂L/∂g_{ab}`, symmetrized
    pub d_metric: Tensor<Jet<R>>,
}

pub fn differentiate<L: Lagrangian, R: Real>(
    lagrangian: &L,
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
) -> Derivatives<R> {
    let n = geo.dim();
    let lift = |t: &Tensor<Jet<R>>| t.map(|c| Dual::constant(c.clone()));
    let mut grads: Vec<Tensor<Dual<Jet<R>>>> = fp.grads.iter().map(lift).collect();
    let mut fields: Vec<Tensor<Dual<Jet<R>>>> = fp.fields.iter().map(lift).collect();
    let mut metric = lift(&geo.metric);
    let coords: Vec<Dual<Jet<R>>> = fp.coords.iter().map(|c| Dual::constant(c.clone())).collect();

    let eval = |grads: &[Tensor<Dual<Jet<R>>>], fields: &[Tensor<Dual<Jet<R>>>], metric: &Tensor<Dual<Jet<R>>>| {
        lagrangian.density(&LagrangianArgs {
            grad: grads,
            fields,
            metric,
            coords: &coords,
        })
    };
    let value = eval(&grads, &fields, &metric).re;

    let mut d_grad = Vec::with_capacity(grads.len());
    for l in 0..grads.len() {
        let mut out = Vec::with_capacity(grads[l].data().len());
        for k in 0..grads[l].data().len() {
            grads[l].data_mut()[k].eps = Jet::one();
            out.push(eval(&grads, &fields, &metric).eps);
            grads[l].data_mut()[k].eps = Jet::zero();
        }
        d_grad.push(Tensor::from_vec(fp.grads[l].shape().dual(), out).expect("shape"));
    }

    let mut d_field = Vec::with_capacity(fields.len());
    for l in 0..fields.len() {
        let mut out = Vec::with_capacity(fields[l].data().len());
        for k in 0..fields[l].data().len() {
            fields[l].data_mut()[k].eps = Jet::one();
            out.push(eval(&grads, &fields, &metric).eps);
            fields[l].data_mut()[k].eps = Jet::zero();
        }
        d_field.push(Tensor::from_vec(fp.fields[l].shape().dual(), out).expect("shape"));
    }

    // seeding g_ab and g_ba together gives ∂/∂g_ab + ∂/∂g_ba
    let mut d_metric = Tensor::zeros(Shape::pq(n, 2, 0));
    for a in 0..n {
        for b in a..n {
            metric[[a, b]].eps = Jet::one();
            metric[[b, a]].eps = Jet::one();
            let d = eval(&grads, &fields, &metric).eps;
            metric[[a, b]].eps = Jet::zero();
            metric[[b, a]].eps = Jet::zero();
            let d = if a == b { d } else { d.scale(0.5) };
            d_metric[[b, a]] = d.clone();
            d_metric[[a, b]] = d;
        }
    }

    Derivatives {
        value,
        d_grad,
        d_field,
        d_metric,
    }
}

/// `Σ_ℓ X_ℓ · Y_ℓ`, contracting the leading `rank(ψ_ℓ)` slots of both.
fn field_sum<R: Real>(
    xs: &[Tensor<Jet<R>>],
    ys: &[Tensor<Jet<R>>],
    ranks: &[usize],
) -> Result<Tensor<Jet<R>>, FieldError> {
    let mut acc: Option<Tensor<Jet<R>>> = None;
    for ((x, y), &r) in xs.iter().zip(ys).zip(ranks) {
        let pairs: Vec<(usize, usize)> = (0..r).map(|i| (i, i)).collect();
        let term = x.tensordot(y, &pairs)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.try_add(&term)?,
        });
    }
    Ok(acc.expect("theory without fields"))
}

fn ranks<R: Real>(fp: &FieldPoint<R>) -> Vec<usize> {
    fp.fields.iter().map(|f| f.rank()).collect()
}

/// `∇_a(∂L/∂(∇_aψ_ℓ)) − ∂L/∂ψ_ℓ` per label.
pub fn eom_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<Vec<Tensor<Jet<R>>>, FieldError> {
    d.d_grad
        .iter()
        .zip(&d.d_field)
        .zip(&fp.fields)
        .map(|((p, df), f)| Ok(geo.divergence(p, f.rank())?.try_sub(df)?))
        .collect()
}

pub fn max_eom_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<f64, FieldError> {
    Ok(eom_residual(geo, fp, d)?
        .iter()
        .map(|t| t.max_abs_value())
        .fold(0.0, f64::max))
}

/// `Q^{acd} = Σ_ℓ ∂L/∂(∇_aψ)·ψ̃^{cd}`.
pub fn q_tensor<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    field_sum(&d.d_grad, &fp.tildes_up(geo)?, &ranks(fp))
}

/// `Θ^{abc} = ½(Q^{acb} − Q^{abc} + Q^{bac} − Q^{bca} + Q^{cab} − Q^{cba})`.
pub fn theta_from_q<R: Real>(q: &Tensor<Jet<R>>) -> Tensor<Jet<R>> {
    Tensor::from_fn(q.shape().clone(), |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut t = q[[a, c, b]].clone() - &q[[a, b, c]];
        t += q[[b, a, c]].clone() - &q[[b, c, a]];
        t += q[[c, a, b]].clone() - &q[[c, b, a]];
        t.scale(0.5)
    })
}

/// `Σ_ℓ ∂L/∂(∇_aψ)·∇^bψ`, slots `[a, b]`.
fn canonical_flux<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    field_sum(&d.d_grad, &fp.grads_up(geo)?, &ranks(fp))
}

/// Canonical, metric and Belinfante tensors with their ingredients.
#[derive(Clone, Debug)]
pub struct EmtBundle<R> {
    pub derivatives: Derivatives<R>,
    pub q: Tensor<Jet<R>>,
    pub theta: Tensor<Jet<R>>,
    pub canonical: Tensor<Jet<R>>,
    pub metric: Tensor<Jet<R>>,
    pub belinfante: Tensor<Jet<R>>,
}

impl<R: Real> EmtBundle<R> {
    pub fn new<L: Lagrangian>(
        lagrangian: &L,
        geo: &GeometryPoint<R>,
        fp: &FieldPoint<R>,
    ) -> Result<Self, FieldError> {
        let derivatives = differentiate(lagrangian, geo, fp);
        Self::from_derivatives(geo, fp, derivatives)
    }

    pub fn from_derivatives(
        geo: &GeometryPoint<R>,
        fp: &FieldPoint<R>,
        derivatives: Derivatives<R>,
    ) -> Result<Self, FieldError> {
        let lg = geo.inverse.scale_by(&derivatives.value);
        let q = q_tensor(geo, fp, &derivatives)?;
        let theta = theta_from_q(&q);

        // T_C = −P^a∇^bψ + g^{ab}L
        let canonical = lg.try_sub(&canonical_flux(geo, fp, &derivatives)?)?;

        // T_M = 2∂L/∂g − ∇_c(Q^{cab} + Θ^{cab}) + g^{ab}L
        let bracket = geo.divergence(&q.try_add(&theta)?, 0)?;
        let metric = derivatives
            .d_metric
            .scale(2.0)
            .try_sub(&bracket)?
            .try_add(&lg)?;

        let belinfante = canonical.try_sub(&geo.divergence(&theta, 0)?)?;
        Ok(Self {
            derivatives,
            q,
            theta,
            canonical,
            metric,
            belinfante,
        })
    }

    pub fn lagrangian(&self) -> &Jet<R> {
        &self.derivatives.value
    }
}

/// `Θ^{abc} + Θ^{bac}`; zero by construction.
pub fn theta_antisymmetry_residual<R: Real>(theta: &Tensor<Jet<R>>) -> Tensor<Jet<R>> {
    theta.try_add(&theta.transpose(0, 1).expect("rank 3")).expect("shape")
}

/// b↔c asymmetry of the two trailing terms of Θ.
pub fn theta_tail_symmetry_residual<R: Real>(q: &Tensor<Jet<R>>) -> Tensor<Jet<R>> {
    // tail^{abc} = ½(Q^{bac} − Q^{bca} + Q^{cab} − Q^{cba})
    let tail = Tensor::from_fn(q.shape().clone(), |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut t = q[[b, a, c]].clone() - &q[[b, c, a]];
        t += q[[c, a, b]].clone() - &q[[c, b, a]];
        t.scale(0.5)
    });
    tail.try_sub(&tail.transpose(1, 2).expect("rank 3")).expect("shape")
}

/// `X − Xᵀ` for a rank-2 tensor.
pub fn asymmetry<R: Real>(t: &Tensor<Jet<R>>) -> Tensor<Jet<R>> {
    t.try_sub(&t.transpose(0, 1).expect("rank 2")).expect("shape")
}

/// `∇_aT_C^{ab}` and `Σ_ℓ ∂L/∂(∇_aψ)·R^b_{adc}·ψ̃^{cd}`; refuses off-shell input.
pub fn canonical_divergence_check<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    emt: &EmtBundle<R>,
) -> Result<(Tensor<Jet<R>>, Tensor<Jet<R>>), FieldError> {
    require_on_shell(geo, fp, &emt.derivatives)?;
    let lhs = geo.divergence(&emt.canonical, 0)?;
    let rhs = geo.riemann.tensordot(&emt.q, &[(1, 0), (2, 2), (3, 1)])?;
    Ok((lhs, rhs))
}

fn require_on_shell<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<(), FieldError> {
    let r = max_eom_residual(geo, fp, d)?;
    if r > ON_SHELL_GATE {
        return Err(FieldError::OffShell(r));
    }
    Ok(())
}

/// `T^{ab}ξ_b`
pub fn contract_with_covector<R: Real>(
    geo: &GeometryPoint<R>,
    t: &Tensor<Jet<R>>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    Ok(t.tensordot(&geo.lower(xi, 0)?, &[(1, 0)])?)
}

/// `j^a = T_B^{ab}ξ_b`
pub fn noether_current<R: Real>(
    geo: &GeometryPoint<R>,
    emt: &EmtBundle<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    contract_with_covector(geo, &emt.belinfante, xi)
}

/// `Θ^{cab}∇_cξ_b`
fn theta_gradient_term<R: Real>(
    geo: &GeometryPoint<R>,
    emt: &EmtBundle<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    // dxi[b, c] = ∇_c ξ_b
    let dxi = geo.covariant_derivative(&geo.lower(xi, 0)?)?;
    Ok(emt.theta.tensordot(&dxi, &[(0, 1), (2, 0)])?)
}

/// `T_C^{ab}ξ_b + Θ^{cab}∇_cξ_b`
pub fn alt_current<R: Real>(
    geo: &GeometryPoint<R>,
    emt: &EmtBundle<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let tc = contract_with_covector(geo, &emt.canonical, xi)?;
    Ok(tc.try_add(&theta_gradient_term(geo, emt, xi)?)?)
}

/// `∇_a(∂L/∂(∇_aψ)·£_ξψ − Lξ^a)`
pub fn lie_current<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    emt: &EmtBundle<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let lies = fp
        .fields
        .iter()
        .map(|f| geo.lie_derivative(f, xi))
        .collect::<Result<Vec<_>, _>>()?;
    let flux = field_sum(&emt.derivatives.d_grad, &lies, &ranks(fp))?;
    Ok(flux.try_sub(&xi.scale_by(emt.lagrangian()))?)
}

/// `Θ`'s contribution to the difference of the two currents:
/// `∇_cΘ^{cab}ξ_b + Θ^{cab}∇_cξ_b`.
pub fn difference_current<R: Real>(
    geo: &GeometryPoint<R>,
    emt: &EmtBundle<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let div_theta = geo.divergence(&emt.theta, 0)?;
    let first = contract_with_covector(geo, &div_theta, xi)?;
    Ok(first.try_add(&theta_gradient_term(geo, emt, xi)?)?)
}

/// Covariant divergence of a vector.
pub fn divergence_of<R: Real>(
    geo: &GeometryPoint<R>,
    j: &Tensor<Jet<R>>,
) -> Result<Jet<R>, FieldError> {
    Ok(geo.vector_divergence(j)?)
}

/// `∇_a(T_B^{ab}ξ_b) − ½T_M^{ab}£_ξg_{ab}`
pub fn master_identity_residual<R: Real>(
    geo: &GeometryPoint<R>,
    emt: &EmtBundle<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Jet<R>, FieldError> {
    let div = divergence_of(geo, &noether_current(geo, emt, xi)?)?;
    let lg = geo.killing_residual(xi)?;
    let source = emt.metric.tensordot(&lg, &[(0, 0), (1, 1)])?;
    Ok(div - source.as_scalar().scale(0.5))
}

/// `2∂L/∂g_{ab} − ∇_c(∂L/∂(∇_cψ)·ψ̃^{ab}) + ∂L/∂(∇_aψ)·∇^bψ`; refuses off-shell input.
pub fn identity_ee_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    emt: &EmtBundle<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    require_on_shell(geo, fp, &emt.derivatives)?;
    let flux = canonical_flux(geo, fp, &emt.derivatives)?;
    Ok(emt
        .derivatives
        .d_metric
        .scale(2.0)
        .try_sub(&geo.divergence(&emt.q, 0)?)?
        .try_add(&flux)?)
}

/// a↔b asymmetry of `∇_c(∂L/∂(∇_cψ)·ψ̃^{ab}) − ∂L/∂(∇_aψ)·∇^bψ`.
pub fn ee_symmetry_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    emt: &EmtBundle<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let flux = canonical_flux(geo, fp, &emt.derivatives)?;
    let rhs = geo.divergence(&emt.q, 0)?.try_sub(&flux)?;
    Ok(asymmetry(&rhs))
}

/// `2∂L/∂g_{ab} + ∂L/∂(∂_aφ)∂^bφ` for a scalar theory.
pub fn ee_scalar_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let flux = d.d_grad[0].tensordot(&geo.raise(&fp.grads[0], 0)?, &[])?;
    Ok(d.d_metric.scale(2.0).try_add(&flux)?)
}

/// `2∂L/∂g_{ab} + ∂L/∂(∇_aA_c)F^b_c` for a one-form theory.
pub fn ee_maxwell_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    // f_up[b, c] = F^b_c
    let f_up = geo.raise(&field_strength(&fp.grads[0]), 0)?;
    // d_grad[c, a] = ∂L/∂(∇_aA_c)
    let term = d.d_grad[0].tensordot(&f_up, &[(0, 1)])?;
    Ok(d.d_metric.scale(2.0).try_add(&term)?)
}

/// `2∂L/∂g_{ab} − ∂L/∂(∇_cψ)·tilde(∇_cψ)^{ab} − ∂L/∂ψ·ψ̃^{ab}`; holds off-shell.
pub fn tilde_lagrangian_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let mut out = d.d_metric.scale(2.0);
    for l in 0..fp.fields.len() {
        let r = fp.fields[l].rank();
        let tg = geo.raise(&tilde(&fp.grads[l]), r + 2)?;
        let pairs: Vec<(usize, usize)> = (0..=r).map(|i| (i, i)).collect();
        out = out.try_sub(&d.d_grad[l].tensordot(&tg, &pairs)?)?;
        let tf = geo.raise(&tilde(&fp.fields[l]), r + 1)?;
        let pairs: Vec<(usize, usize)> = (0..r).map(|i| (i, i)).collect();
        out = out.try_sub(&d.d_field[l].tensordot(&tf, &pairs)?)?;
    }
    Ok(out)
}

/// `£_ξL` through the chain rule minus `ξ^a∂_aL`.
pub fn scalar_lagrangian_residual<R: Real>(
    geo: &GeometryPoint<R>,
    fp: &FieldPoint<R>,
    d: &Derivatives<R>,
    xi: &Tensor<Jet<R>>,
) -> Result<Jet<R>, FieldError> {
    let mut chain = Jet::zero();
    for l in 0..fp.fields.len() {
        let full = |t: &Tensor<Jet<R>>| -> Vec<(usize, usize)> { (0..t.rank()).map(|i| (i, i)).collect() };
        let lg = geo.lie_derivative(&fp.grads[l], xi)?;
        chain += d.d_grad[l].tensordot(&lg, &full(&lg))?.as_scalar().clone();
        let lf = geo.lie_derivative(&fp.fields[l], xi)?;
        chain += d.d_field[l].tensordot(&lf, &full(&lf))?.as_scalar().clone();
    }
    let lm = geo.killing_residual(xi)?;
    chain += d.d_metric.tensordot(&lm, &[(0, 0), (1, 1)])?.as_scalar().clone();
    let transport = gradient(&Tensor::scalar(geo.dim(), d.value.clone()))?.tensordot(xi, &[(0, 0)])?;
    Ok(chain - transport.as_scalar())
}

/// `F^{ac}F^b_c + g^{ab}L` for `L = −¼F²`, from `∇A` alone.
pub fn maxwell_emt_closed_form<R: Real>(
    geo: &GeometryPoint<R>,
    grad: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, FieldError> {
    let f = field_strength(grad);
    let f_mixed = geo.raise(&f, 0)?; // F^a_c
    let f_up = geo.raise(&f_mixed, 1)?; // F^{ac}
    let ff = f_up.tensordot(&f_mixed, &[(1, 1)])?;
    let l = maxwell_density(&geo.inverse, &f);
    Ok(ff.try_add(&geo.inverse.scale_by(&l))?)
}
