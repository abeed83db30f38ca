//! Metric variation of the action on a midpoint-rule grid.
//!
//! The family `g + εh` is evaluated with `ε` as one extra jet variable, so
//! `d(L√|g|)/dε` at `ε = 0` is read off a Taylor coefficient and no finite
//! differences are involved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{EmtBundle, FieldConfiguration, FieldError, FieldPoint, Lagrangian, LagrangianArgs};
use crate::geometry::{GeometryError, GeometryPoint, MetricField, TensorField};
use crate::jet::{lift, Jet};
use crate::scalar::Scalar;
use crate::tensor::{Shape, Tensor};

/// `|h|` on the region boundary relative to its peak above which the support
/// counts as touching the boundary.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VariationalError {
    #[error("perturbation reaches the region boundary (|h| = {boundary:e}, peak {peak:e})")]
    SupportTouchesBoundary { boundary: f64, peak: f64 },
    #[error("grid resolution must be at least 1")]
    EmptyGrid,
    #[error("region has dimension {region}, metric has {metric}")]
    Dimension { region: usize, metric: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<GeometryError> for VariationalError {
    fn from(e: GeometryError) -> Self {
        VariationalError::Field(e.into())
    }
}

impl From<crate::jet::JetError> for VariationalError {
    fn from(e: crate::jet::JetError) -> Self {
        VariationalError::Field(e.into())
    }
}

/// `h_{ab} = A_{ab} exp(−|x − c|²/w²)` with a symmetric amplitude matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPerturbation {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: Vec<Vec<f64>>,
}

impl GaussianPerturbation {
    /// Random symmetric amplitudes in `[−scale, scale]`.
    pub fn seeded(center: Vec<f64>, width: f64, scale: f64, seed: u64) -> Self {
        let n = center.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amplitude = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a..n {
                let v = scale * rng.gen_range(-1.0..1.0);
                amplitude[a][b] = v;
                amplitude[b][a] = v;
            }
        }
        Self {
            center,
            width,
            amplitude,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            center: vec![0.0; dim],
            width: 1.0,
            amplitude: vec![vec![0.0; dim]; dim],
        }
    }

    fn envelope_f64(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        (-r2 / (self.width * self.width)).exp()
    }

    fn peak(&self) -> f64 {
        self.amplitude
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl TensorField for GaussianPerturbation {
    fn shape(&self) -> Shape {
        Shape::pq(self.center.len(), 0, 2)
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> Tensor<S> {
        let mut r2 = S::zero();
        for (xi, c) in x.iter().zip(&self.center) {
            r2 += (xi.clone() - S::from_f64(*c)).square();
        }
        let env = r2.scale(-1.0 / (self.width * self.width)).exp();
        Tensor::from_fn(self.shape(), |i| env.scale(self.amplitude[i[0]][i[1]]))
    }
}

/// Both sides of the variational identity plus its pointwise form.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalResult {
    /// `dS/dε`
    pub action_derivative: f64,
    /// `½∫T_M^{ab}h_{ab}√|g|`
    pub emt_integral: f64,
    /// Largest pointwise residual of
    /// `δ(L√|g|) − ½T_M h √|g| − ½∇_c((Q + Θ)^{cab} h_{ab}) √|g|`.
    pub pointwise: f64,
    pub cells: usize,
}

impl VariationalResult {
    pub fn difference(&self) -> f64 {
        (self.action_derivative - self.emt_integral).abs()
    }

    pub fn relative_difference(&self) -> f64 {
        let scale = self.action_derivative.abs().max(self.emt_integral.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.difference() / scale
        }
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

struct Perturbed<'a, M> {
    metric: &'a M,
    h: &'a GaussianPerturbation,
}

impl<M: MetricField> Perturbed<'_, M> {
    /// `g + εh` where `ε` is the trailing jet variable.
    fn components(&self, x: &[Jet<f64>], eps: &Jet<f64>) -> Tensor<Jet<f64>> {
        let g = self.metric.components(x);
        let h = self.h.eval(x);
        g.try_add(&h.scale_by(eps)).expect("metric shapes")
    }
}

fn grid_points(bounds: &[(f64, f64)], resolution: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
    let n = bounds.len();
    let total = resolution.pow(n as u32);
    (0..total).map(move |mut k| {
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let j = k % resolution;
            k /= resolution;
            let (lo, hi) = bounds[i];
            x[i] = lo + (hi - lo) * (j as f64 + 0.5) / resolution as f64;
        }
        x
    })
}

fn check_support(h: &GaussianPerturbation, bounds: &[(f64, f64)], resolution: usize) -> Result<(), VariationalError> {
    let peak = h.peak();
    if peak == 0.0 {
        return Ok(());
    }
    let n = bounds.len();
    let mut boundary = 0.0f64;
    for face in 0..n {
        let others: Vec<(f64, f64)> = bounds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != face)
            .map(|(_, b)| *b)
            .collect();
        for side in [bounds[face].0, bounds[face].1] {
            for y in grid_points(&others, resolution) {
                let mut x = y;
                x.insert(face, side);
                boundary = boundary.max(peak * h.envelope_f64(&x));
            }
        }
    }
    if boundary > SUPPORT_TOLERANCE * peak {
        return Err(VariationalError::SupportTouchesBoundary { boundary, peak });
    }
    Ok(())
}

/// Compares `dS/dε` of `S = ∫L√|g|` along `g + εh` with `½∫T_M h √|g|`
/// on a midpoint grid of `resolution^n` cells, fields held fixed.
pub fn variational_tm_check<M, F, L>(
    lagrangian: &L,
    metric: &M,
    field: &F,
    h: &GaussianPerturbation,
    bounds: &[(f64, f64)],
    resolution: usize,
) -> Result<VariationalResult, VariationalError>
where
    M: MetricField,
    F: FieldConfiguration,
    L: Lagrangian,
{
    let n = metric.dim();
    if bounds.len() != n || h.center.len() != n {
        return Err(VariationalError::Dimension {
            region: bounds.len(),
            metric: n,
        });
    }
    if resolution == 0 {
        return Err(VariationalError::EmptyGrid);
    }
    check_support(h, bounds, resolution)?;
    let cell: f64 = bounds
        .iter()
        .map(|(lo, hi)| (hi - lo) / resolution as f64)
        .product();
    let family = Perturbed { metric, h };

    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut pointwise = 0.0f64;
    for x in grid_points(bounds, resolution) {
        // d(L√|g|)/dε from jets in (x, ε)
        let mut xe = x.clone();
        xe.push(0.0);
        let jets = lift(&xe, 2)?;
        let (coords, eps) = jets.split_at(n);
        let geo_eps = GeometryPoint::from_metric(family.components(coords, &eps[0]))?;
        let fp_eps = FieldPoint::new(lagrangian, &geo_eps, coords.to_vec(), field.eval(coords))?;
        let density = lagrangian.density(&LagrangianArgs {
            grad: &fp_eps.grads,
            fields: &fp_eps.fields,
            metric: &geo_eps.metric,
            coords: &fp_eps.coords,
        }) * &geo_eps.volume;
        let d_action = density.derivative(&[n])?;

        // ½T_M^{ab}h_{ab}√|g| from jets in x
        let coords = lift(&x, 2)?;
        let geo = GeometryPoint::from_metric(metric.components(&coords))?;
        let fp = FieldPoint::new(lagrangian, &geo, coords.clone(), field.eval(&coords))?;
        let emt = EmtBundle::new(lagrangian, &geo, &fp)?;
        let hj = h.eval(&coords);
        let th = emt.metric.tensordot(&hj, &[(0, 0), (1, 1)]).map_err(GeometryError::from)?;
        let source = th.as_scalar().value() * 0.5 * geo.volume.value();

        // boundary term of the pointwise identity
        let bracket = emt.q.try_add(&emt.theta).map_err(GeometryError::from)?;
        let w = bracket.tensordot(&hj, &[(1, 0), (2, 1)]).map_err(GeometryError::from)?;
        let div = geo.vector_divergence(&w)?.value() * 0.5 * geo.volume.value();

        pointwise = pointwise.max((d_action - source - div).abs());
        lhs.push(d_action * cell);
        rhs.push(source * cell);
    }
    Ok(VariationalResult {
        action_derivative: pairwise_sum(&lhs),
        emt_integral: pairwise_sum(&rhs),
        pointwise,
        cells: lhs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    #[test]
    fn grid_is_cell_centred() {
        let pts: Vec<Vec<f64>> = grid_points(&[(0.0, 1.0), (-1.0, 1.0)], 2).collect();
        assert_eq!(pts[0], vec![0.25, -0.5]);
        assert_eq!(pts[3], vec![0.75, 0.5]);
    }

    #[test]
    fn support_guard() {
        let wide = GaussianPerturbation::seeded(vec![0.0, 0.0], 0.6, 0.1, 1);
        assert!(matches!(
            check_support(&wide, &[(-1.0, 1.0), (-1.0, 1.0)], 8),
            Err(VariationalError::SupportTouchesBoundary { .. })
        ));
        let narrow = GaussianPerturbation::seeded(vec![0.0, 0.0], 0.15, 0.1, 1);
        assert!(check_support(&narrow, &[(-1.0, 1.0), (-1.0, 1.0)], 8).is_ok());
    }
}
