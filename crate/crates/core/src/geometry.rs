//! Levi-Civita geometry evaluated pointwise on jets.
//!
//! Every quantity here is a [`Tensor`] of [`Jet`]s, i.e. a tensor field known
//! to some finite order about the evaluation point. Each covariant or partial
//! derivative consumes one jet order.
//!
//! Conventions: `Γ^b_{ca}` is stored with slots `[b, c, a]`; the derivative
//! slot of `∇T` is appended last; the Riemann tensor `R^d_{cab}` is stored as
//! `[d, c, a, b]` and satisfies `(∇_a∇_b − ∇_b∇_a) v^e = R^e_{cab} v^c`.

use thiserror::Error;

use crate::jet::{lift, Jet, JetError};
use crate::linalg;
use crate::scalar::{Real, Scalar};
use crate::tensor::{Shape, Tensor, TensorError, Variance};
use crate::tilde::{levi_civita, tilde};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("degenerate metric: |det g| = {0:e}")]
    Degenerate(f64),
    #[error("metric is not symmetric (asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("point {0:?} lies outside the chart's validity domain")]
    OutsideDomain(Vec<f64>),
    #[error("metric jets of order {required} are required, got {got}")]
    InsufficientOrder { required: usize, got: usize },
    #[error("expected a {expected} tensor, got {got}")]
    WrongShape { expected: &'static str, got: String },
}

/// Smallest `|det g|` accepted before a point is rejected as degenerate.
pub const DEGENERACY_GUARD: f64 = 1e-12;

/// A coordinate point in a named chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A metric given by component functions of the coordinates.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    /// Signature as a list of ±1.
    fn signature(&self) -> Vec<i8>;

    /// Symmetric (0,2) components at `x`.
    fn components<S: Scalar>(&self, x: &[S]) -> Tensor<S>;

    /// Chart validity domain.
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
}

/// A tensor field given by component functions of the coordinates.
pub trait TensorField: Send + Sync {
    fn shape(&self) -> Shape;

    fn eval<S: Scalar>(&self, x: &[S]) -> Tensor<S>;
}

/// `∂_a T` with the derivative slot appended.
pub fn gradient<R: Real>(t: &Tensor<Jet<R>>) -> Result<Tensor<Jet<R>>, JetError> {
    let n = t.dim();
    let shape = t.shape().with_slot(Variance::Down);
    let mut data = Vec::with_capacity(shape.len());
    for c in t.data() {
        for a in 0..n {
            data.push(c.partial(a)?);
        }
    }
    Ok(Tensor::from_vec(shape, data).expect("gradient shape"))
}

/// Lie derivative from partial derivatives: `£_ξT = ∂_aT ξ^a − T̃^a_b ∂_aξ^b`.
pub fn lie_derivative_partial<R: Real>(
    t: &Tensor<Jet<R>>,
    xi: &Tensor<Jet<R>>,
) -> Result<Tensor<Jet<R>>, GeometryError> {
    check_vector(xi)?;
    let r = t.rank();
    let transport = gradient(t)?.tensordot(xi, &[(r, 0)])?;
    let frame = tilde(t).tensordot(&gradient(xi)?, &[(r, 1), (r + 1, 0)])?;
    Ok(transport.try_sub(&frame)?)
}

fn check_vector<S: Scalar>(xi: &Tensor<S>) -> Result<(), GeometryError> {
    if xi.slots() != [Variance::Up] {
        return Err(GeometryError::WrongShape {
            expected: "(1,0)",
            got: xi.shape().to_string(),
        });
    }
    Ok(())
}

/// Metric, connection and curvature at one point.
#[derive(Clone, Debug)]
pub struct GeometryPoint<R> {
    /// `g_{ab}`
    pub metric: Tensor<Jet<R>>,
    /// `g^{ab}`
    pub inverse: Tensor<Jet<R>>,
    /// `√|det g|`
    pub volume: Jet<R>,
    /// `Γ^b_{ca}`, slots `[b, c, a]`
    pub christoffel: Tensor<Jet<R>>,
    /// `R^d_{cab}`, slots `[d, c, a, b]`
    pub riemann: Tensor<Jet<R>>,
    /// `R_{ab} = R^c_{acb}`
    pub ricci: Tensor<Jet<R>>,
}

impl<R: Real> GeometryPoint<R> {
    /// Builds the geometry from metric component jets (order ≥ 2 unless exact).
    pub fn from_metric(metric: Tensor<Jet<R>>) -> Result<Self, GeometryError> {
        if metric.slots() != [Variance::Down, Variance::Down] {
            return Err(GeometryError::WrongShape {
                expected: "(0,2)",
                got: metric.shape().to_string(),
            });
        }
        let n = metric.dim();
        if let Some(got) = metric.data().iter().filter_map(|c| c.order()).min() {
            if got < 2 {
                return Err(GeometryError::InsufficientOrder { required: 2, got });
            }
        }
        let asym = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| (metric[[a, b]].value() - metric[[b, a]].value()).abs())
            .fold(0.0, f64::max);
        if asym > 1e-12 * metric.max_abs_value().max(1.0) {
            return Err(GeometryError::Asymmetric(asym));
        }

        let rows: Vec<Vec<Jet<R>>> = (0..n)
            .map(|a| (0..n).map(|b| metric[[a, b]].clone()).collect())
            .collect();
        let (inv, det) =
            linalg::invert_with_det(&rows).ok_or(GeometryError::Degenerate(0.0))?;
        if det.value().abs() <= DEGENERACY_GUARD {
            return Err(GeometryError::Degenerate(det.value().abs()));
        }
        let volume = if det.value() < 0.0 { -det } else { det }.sqrt();
        let inverse = Tensor::from_fn(Shape::pq(n, 2, 0), |i| inv[i[0]][i[1]].clone());

        // Γ_{dca} = ½(∂_c g_{da} + ∂_a g_{dc} − ∂_d g_{ca}), dg[x,y,z] = ∂_z g_{xy}
        let dg = gradient(&metric)?;
        let lowered = Tensor::from_fn(Shape::pq(n, 0, 3), |i| {
            let (d, c, a) = (i[0], i[1], i[2]);
            (dg[[d, a, c]].clone() + &dg[[d, c, a]] - &dg[[c, a, d]]).scale(0.5)
        });
        let christoffel = inverse.tensordot(&lowered, &[(1, 0)])?;

        let dgamma = gradient(&christoffel)?;
        let riemann = Tensor::from_fn(Shape::pq(n, 1, 3), |i| {
            let (e, c, a, b) = (i[0], i[1], i[2], i[3]);
            let mut acc = dgamma[[e, b, c, a]].clone() - &dgamma[[e, a, c, b]];
            for f in 0..n {
                acc.mul_add_assign(&christoffel[[e, a, f]], &christoffel[[f, b, c]]);
                let t = christoffel[[e, b, f]].mul_ref(&christoffel[[f, a, c]]);
                acc -= t;
            }
            acc
        });
        let ricci = riemann.contract(0, 2)?;

        Ok(Self {
            metric,
            inverse,
            volume,
            christoffel,
            riemann,
            ricci,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn ricci_scalar(&self) -> Result<Jet<R>, GeometryError> {
        let mixed = self.inverse.tensordot(&self.ricci, &[(1, 0)])?;
        Ok(mixed.contract(0, 1)?.as_scalar().clone())
    }

    /// `R_{abcd}` with the first slot lowered.
    pub fn riemann_lowered(&self) -> Result<Tensor<Jet<R>>, GeometryError> {
        Ok(self.riemann.lower(0, &self.metric)?)
    }

    pub fn raise(&self, t: &Tensor<Jet<R>>, slot: usize) -> Result<Tensor<Jet<R>>, GeometryError> {
        Ok(t.raise(slot, &self.inverse)?)
    }

    pub fn lower(&self, t: &Tensor<Jet<R>>, slot: usize) -> Result<Tensor<Jet<R>>, GeometryError> {
        Ok(t.lower(slot, &self.metric)?)
    }

    /// `∇_a T = ∂_a T + Γ^b_{ca} T̃^c_b`, new slot appended.
    pub fn covariant_derivative(&self, t: &Tensor<Jet<R>>) -> Result<Tensor<Jet<R>>, GeometryError> {
        let r = t.rank();
        let partial = gradient(t)?;
        if r == 0 {
            return Ok(partial);
        }
        let connection = tilde(t).tensordot(&self.christoffel, &[(r, 1), (r + 1, 0)])?;
        Ok(partial.try_add(&connection)?)
    }

    /// `∇_a T^{…a…}` contracting the up-slot `slot` with the new derivative slot.
    pub fn divergence(&self, t: &Tensor<Jet<R>>, slot: usize) -> Result<Tensor<Jet<R>>, GeometryError> {
        let d = self.covariant_derivative(t)?;
        Ok(d.contract(slot, t.rank())?)
    }

    /// Lie derivative from covariant derivatives: `£_ξT = ∇_aT ξ^a − T̃^a_b ∇_aξ^b`.
    pub fn lie_derivative(
        &self,
        t: &Tensor<Jet<R>>,
        xi: &Tensor<Jet<R>>,
    ) -> Result<Tensor<Jet<R>>, GeometryError> {
        check_vector(xi)?;
        let r = t.rank();
        let transport = self.covariant_derivative(t)?.tensordot(xi, &[(r, 0)])?;
        let frame = tilde(t).tensordot(&self.covariant_derivative(xi)?, &[(r, 1), (r + 1, 0)])?;
        Ok(transport.try_sub(&frame)?)
    }

    /// `£_ξ g_{ab}`; zero iff ξ is Killing.
    pub fn killing_residual(&self, xi: &Tensor<Jet<R>>) -> Result<Tensor<Jet<R>>, GeometryError> {
        self.lie_derivative(&self.metric, xi)
    }

    /// `∇_a ξ^b` as slots `[b, a]`; zero iff ξ is parallel.
    pub fn parallel_residual(&self, xi: &Tensor<Jet<R>>) -> Result<Tensor<Jet<R>>, GeometryError> {
        check_vector(xi)?;
        self.covariant_derivative(xi)
    }

    /// `∇_a ξ_b + ∇_b ξ_a`
    pub fn symmetrized_gradient(&self, xi: &Tensor<Jet<R>>) -> Result<Tensor<Jet<R>>, GeometryError> {
        let lowered = self.lower(xi, 0)?;
        // slots [b, a] holding ∇_a ξ_b
        let d = self.covariant_derivative(&lowered)?;
        Ok(d.try_add(&d.transpose(0, 1)?)?)
    }

    /// `∇_a ξ^a`
    pub fn vector_divergence(&self, xi: &Tensor<Jet<R>>) -> Result<Jet<R>, GeometryError> {
        check_vector(xi)?;
        Ok(self.divergence(xi, 0)?.as_scalar().clone())
    }

    /// Volume form `√|g| ε_{a1…an}`.
    pub fn volume_form(&self) -> Tensor<Jet<R>> {
        levi_civita::<Jet<R>>(self.dim()).scale_by(&self.volume)
    }

    /// `(∇_a∇_b − ∇_b∇_a)T − R^d_{cab} T̃^c_d`, slots `(T…, a, b)`.
    pub fn curvature_commutator_residual(
        &self,
        t: &Tensor<Jet<R>>,
    ) -> Result<Tensor<Jet<R>>, GeometryError> {
        let r = t.rank();
        // second[I, b, a] = ∇_a∇_b T
        let second = self.covariant_derivative(&self.covariant_derivative(t)?)?;
        let commutator = second.transpose(r, r + 1)?.try_sub(&second)?;
        let curvature = tilde(t).tensordot(&self.riemann, &[(r, 1), (r + 1, 0)])?;
        Ok(commutator.try_sub(&curvature)?)
    }

    /// `tilde(∇_e T)^a_b − ∇_e(T̃^a_b) + δ^a_e ∇_b T`, slots `(T…, e, a, b)`.
    pub fn tilde_derivative_residual(
        &self,
        t: &Tensor<Jet<R>>,
    ) -> Result<Tensor<Jet<R>>, GeometryError> {
        let r = t.rank();
        let dt = self.covariant_derivative(t)?;
        let lhs = tilde(&dt);
        // ∇(T̃) has slots (T…, a, b, e); bring e before a, b
        let mut perm: Vec<usize> = (0..r).collect();
        perm.extend([r + 2, r, r + 1]);
        let d_tilde = self.covariant_derivative(&tilde(t))?.permute(&perm)?;
        let shape = lhs.shape().clone();
        let correction = Tensor::from_fn(shape, |i| {
            let (e, a, b) = (i[r], i[r + 1], i[r + 2]);
            if e == a {
                let mut j = i[..r].to_vec();
                j.push(b);
                dt[&j[..]].clone()
            } else {
                Jet::constant(R::zero())
            }
        });
        Ok(lhs.try_sub(&d_tilde)?.try_add(&correction)?)
    }

    /// `C_ξ^c_{ba} = R^c_{bda} ξ^d + ∇_a∇_b ξ^c`, slots `[c, b, a]`.
    pub fn c_tensor(&self, xi: &Tensor<Jet<R>>) -> Result<Tensor<Jet<R>>, GeometryError> {
        check_vector(xi)?;
        let curvature = self.riemann.tensordot(xi, &[(2, 0)])?;
        let second = self.covariant_derivative(&self.covariant_derivative(xi)?)?;
        Ok(curvature.try_add(&second)?)
    }

    /// `C_ξ^d_{ab} = ½ g^{dc}(∇_a£g_{bc} + ∇_b£g_{ac} − ∇_c£g_{ab})`, slots `[d, a, b]`.
    pub fn c_tensor_from_lie_metric(
        &self,
        xi: &Tensor<Jet<R>>,
    ) -> Result<Tensor<Jet<R>>, GeometryError> {
        // y[b, c, a] = ∇_a £g_{bc}
        let y = self.covariant_derivative(&self.killing_residual(xi)?)?;
        let n = self.dim();
        let lowered = Tensor::from_fn(Shape::pq(n, 0, 3), |i| {
            let (c, a, b) = (i[0], i[1], i[2]);
            (y[[b, c, a]].clone() + &y[[a, c, b]] - &y[[a, b, c]]).scale(0.5)
        });
        Ok(self.inverse.tensordot(&lowered, &[(1, 0)])?)
    }

    /// `D_ξ T = £_ξ(∇T) − ∇(£_ξT)`, computed directly.
    pub fn lie_nabla_commutator(
        &self,
        t: &Tensor<Jet<R>>,
        xi: &Tensor<Jet<R>>,
    ) -> Result<Tensor<Jet<R>>, GeometryError> {
        let lie_of_grad = self.lie_derivative(&self.covariant_derivative(t)?, xi)?;
        let grad_of_lie = self.covariant_derivative(&self.lie_derivative(t, xi)?)?;
        Ok(lie_of_grad.try_sub(&grad_of_lie)?)
    }

    /// `D_ξ T = C_ξ^c_{ba} T̃^b_c` for a precomputed `C_ξ`.
    pub fn lie_nabla_commutator_from_c(
        &self,
        t: &Tensor<Jet<R>>,
        c: &Tensor<Jet<R>>,
    ) -> Result<Tensor<Jet<R>>, GeometryError> {
        let r = t.rank();
        Ok(tilde(t).tensordot(c, &[(r, 1), (r + 1, 0)])?)
    }
}

/// Lifts `point`, evaluates the metric and builds its geometry.
pub fn geometry_at<M: MetricField>(
    metric: &M,
    point: &Point,
    order: usize,
) -> Result<GeometryPoint<f64>, GeometryError> {
    if point.dim() != metric.dim() {
        return Err(TensorError::DimensionMismatch(point.dim(), metric.dim()).into());
    }
    if !metric.contains(&point.coords) {
        return Err(GeometryError::OutsideDomain(point.coords.clone()));
    }
    let x = lift(&point.coords, order)?;
    GeometryPoint::from_metric(metric.components(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Flat2;
    impl MetricField for Flat2 {
        fn dim(&self) -> usize {
            2
        }
        fn signature(&self) -> Vec<i8> {
            vec![1, 1]
        }
        fn components<S: Scalar>(&self, _x: &[S]) -> Tensor<S> {
            Tensor::from_fn(Shape::pq(2, 0, 2), |i| {
                if i[0] == i[1] {
                    S::one()
                } else {
                    S::zero()
                }
            })
        }
    }

    /// Round sphere of radius 2 in (θ, φ).
    struct Sphere;
    impl MetricField for Sphere {
        fn dim(&self) -> usize {
            2
        }
        fn signature(&self) -> Vec<i8> {
            vec![1, 1]
        }
        fn components<S: Scalar>(&self, x: &[S]) -> Tensor<S> {
            let s = x[0].sin();
            Tensor::from_fn(Shape::pq(2, 0, 2), |i| match (i[0], i[1]) {
                (0, 0) => S::from_f64(4.0),
                (1, 1) => s.square().scale(4.0),
                _ => S::zero(),
            })
        }
        fn contains(&self, x: &[f64]) -> bool {
            x[0] > 0.1 && x[0] < 3.0
        }
    }

    #[test]
    fn flat_chart_has_no_connection() {
        let geo = geometry_at(&Flat2, &Point::new(vec![0.3, -0.2]), 3).unwrap();
        assert_eq!(geo.christoffel.max_abs_value(), 0.0);
        assert_eq!(geo.riemann.max_abs_value(), 0.0);
        assert_eq!(geo.volume.value(), 1.0);
    }

    #[test]
    fn sphere_curvature() {
        let geo = geometry_at(&Sphere, &Point::new(vec![1.1, 0.4]), 3).unwrap();
        // R = 2 / a^2
        assert!((geo.ricci_scalar().unwrap().value() - 0.5).abs() < 1e-13);
        // Γ^θ_{φφ} = −sinθ cosθ
        let expected = -(1.1f64).sin() * (1.1f64).cos();
        assert!((geo.christoffel[[0, 1, 1]].value() - expected).abs() < 1e-14);
    }

    #[test]
    fn lie_of_flat_metric_along_quadratic_field() {
        let x = lift(&[1.5, 0.2], 3).unwrap();
        let xi = Tensor::from_vec(Shape::pq(2, 1, 0), vec![x[0].square(), Jet::constant(0.0)]).unwrap();
        let geo = GeometryPoint::from_metric(Flat2.components(&x)).unwrap();
        let l = geo.lie_derivative(&geo.metric, &xi).unwrap();
        assert!((l[[0, 0]].value() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            geometry_at(&Sphere, &Point::new(vec![3.1, 0.0]), 3),
            Err(GeometryError::OutsideDomain(_))
        ));
        let x = lift(&[1.0, 0.0], 1).unwrap();
        assert!(matches!(
            GeometryPoint::from_metric(Sphere.components(&x)),
            Err(GeometryError::InsufficientOrder { required: 2, got: 1 })
        ));
        let degenerate = Tensor::<Jet<f64>>::zeros(Shape::pq(2, 0, 2));
        assert!(matches!(
            GeometryPoint::from_metric(degenerate),
            Err(GeometryError::Degenerate(_))
        ));
        let x = lift(&[1.0, 0.0], 1).unwrap();
        let c = Tensor::scalar(2, x[0].clone());
        let geo = geometry_at(&Flat2, &Point::new(vec![1.0, 0.0]), 2).unwrap();
        let once = geo.covariant_derivative(&c).unwrap();
        assert!(matches!(
            geo.covariant_derivative(&once),
            Err(GeometryError::Jet(JetError::OrderExhausted))
        ));
    }
}
