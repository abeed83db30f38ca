//! Catalog of metrics, vector fields and field configurations, with seeded
//! samplers and startup verification of every claim an entry makes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{
    max_eom_residual, EmtBundle, FieldConfiguration, FieldError, FieldPoint, Theory,
};
use crate::geometry::{geometry_at, GeometryError, MetricField, Point, TensorField};
use crate::jet::lift;
use crate::scalar::Scalar;
use crate::tensor::{Shape, Tensor, Variance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{field}` is not defined on metric `{metric}`")]
    Incompatible { field: String, metric: String },
    #[error("sampler rejected more than 99% of draws for `{0}`")]
    Rejection(String),
    #[error("point count must be at least 1")]
    NoPoints,
    #[error("{entry}: claim `{claim}` fails with residual {residual:e}")]
    Claim {
        entry: String,
        claim: &'static str,
        residual: f64,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<crate::jet::JetError> for CatalogError {
    fn from(e: crate::jet::JetError) -> Self {
        CatalogError::Geometry(e.into())
    }
}

/// Tolerance for Killing, parallel and flatness claims.
pub const CLAIM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// `diag(−1, 1, …, 1)`
    Minkowski { dim: usize },
    /// `(t, r, θ, φ)` chart
    Schwarzschild { mass: f64 },
    /// `e^{2φ}δ` with `φ = A exp(−(x² + y²)/w²)`
    ConformalBump { amplitude: f64, width: f64 },
}

impl Metric {
    fn bump<S: Scalar>(amplitude: f64, width: f64, x: &[S]) -> S {
        let r2 = x[0].square() + x[1].square();
        r2.scale(-1.0 / (width * width)).exp().scale(amplitude)
    }
}

impl MetricField for Metric {
    fn dim(&self) -> usize {
        match self {
            Metric::Minkowski { dim } => *dim,
            Metric::Schwarzschild { .. } => 4,
            Metric::ConformalBump { .. } => 2,
        }
    }

    fn signature(&self) -> Vec<i8> {
        match self {
            Metric::ConformalBump { .. } => vec![1, 1],
            _ => {
                let mut s = vec![1; self.dim()];
                s[0] = -1;
                s
            }
        }
    }

    fn components<S: Scalar>(&self, x: &[S]) -> Tensor<S> {
        let n = self.dim();
        let diag: Vec<S> = match self {
            Metric::Minkowski { .. } => (0..n)
                .map(|a| S::from_f64(if a == 0 { -1.0 } else { 1.0 }))
                .collect(),
            Metric::Schwarzschild { mass } => {
                let r = &x[1];
                let f = S::one() - r.recip().scale(2.0 * mass);
                let r2 = r.square();
                let s2 = x[2].sin().square();
                vec![-f.clone(), f.recip(), r2.clone(), r2 * s2]
            }
            Metric::ConformalBump { amplitude, width } => {
                let w = Self::bump(*amplitude, *width, x).scale(2.0).exp();
                vec![w.clone(), w]
            }
        };
        Tensor::from_fn(Shape::pq(n, 0, 2), |i| {
            if i[0] == i[1] {
                diag[i[0]].clone()
            } else {
                S::zero()
            }
        })
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Metric::Schwarzschild { mass } => x[1] > 2.0 * mass && x[2] > 0.0 && x[2] < PI,
            _ => true,
        }
    }
}

/// Sampling box plus excluded regions.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub bounds: Vec<(f64, f64)>,
    /// Excludes points whose spatial radius `|(x¹, …)|` is below the value.
    pub min_spatial_radius: Option<f64>,
}

impl Domain {
    pub fn cube(dim: usize, half: f64) -> Self {
        Self {
            bounds: vec![(-half, half); dim],
            min_spatial_radius: None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let inside = self
            .bounds
            .iter()
            .zip(x)
            .all(|(&(lo, hi), &v)| v >= lo && v <= hi);
        inside
            && self
                .min_spatial_radius
                .map_or(true, |r0| spatial_radius(x) >= r0)
    }
}

fn spatial_radius(x: &[f64]) -> f64 {
    x[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Uniform seeded draws from `domain` that also satisfy `accept`.
pub fn sample_in(
    name: &str,
    domain: &Domain,
    count: usize,
    seed: u64,
    accept: impl Fn(&[f64]) -> bool,
) -> Result<Vec<Point>, CatalogError> {
    if count == 0 {
        return Err(CatalogError::NoPoints);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 100 * count;
    let mut out = Vec::with_capacity(count);
    for _ in 0..budget {
        let x: Vec<f64> = domain
            .bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect();
        if domain.contains(&x) && accept(&x) {
            out.push(Point::new(x));
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(CatalogError::Rejection(name.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum VectorKind {
    Translation(usize),
    /// `x^i ∂_j − x^j ∂_i`
    Rotation(usize, usize),
    /// `x^i ∂_t + t ∂_i`
    Boost(usize),
    /// `sinφ ∂_θ + cotθ cosφ ∂_φ`
    SphereRotationX,
    /// `cosφ ∂_θ − cotθ sinφ ∂_φ`
    SphereRotationY,
    Random(RandomTensorField),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub name: String,
    pub dim: usize,
    pub kind: VectorKind,
    pub killing: bool,
    pub parallel: bool,
}

impl VectorField {
    fn new(name: impl Into<String>, dim: usize, kind: VectorKind, killing: bool, parallel: bool) -> Self {
        Self {
            name: name.into(),
            dim,
            kind,
            killing,
            parallel,
        }
    }

    /// Seeded random vector field, not claimed Killing.
    pub fn random(domain: &Domain, seed: u64) -> Self {
        let dim = domain.bounds.len();
        let field = RandomTensorField::new(Shape::pq(dim, 1, 0), domain, seed);
        Self::new(format!("random-{seed}"), dim, VectorKind::Random(field), false, false)
    }
}

impl TensorField for VectorField {
    fn shape(&self) -> Shape {
        Shape::pq(self.dim, 1, 0)
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> Tensor<S> {
        let n = self.dim;
        let mut v = vec![S::zero(); n];
        match &self.kind {
            VectorKind::Translation(a) => v[*a] = S::one(),
            VectorKind::Rotation(i, j) => {
                v[*j] = x[*i].clone();
                v[*i] = -x[*j].clone();
            }
            VectorKind::Boost(i) => {
                v[0] = x[*i].clone();
                v[*i] = x[0].clone();
            }
            VectorKind::SphereRotationX => {
                let cot = x[2].cos() / x[2].sin();
                v[2] = x[3].sin();
                v[3] = cot * x[3].cos();
            }
            VectorKind::SphereRotationY => {
                let cot = x[2].cos() / x[2].sin();
                v[2] = x[3].cos();
                v[3] = -(cot * x[3].sin());
            }
            VectorKind::Random(field) => return field.eval(x),
        }
        Tensor::from_vec(self.shape(), v).expect("vector shape")
    }
}

/// Degree-3 polynomial times a Gaussian envelope in box-scaled coordinates,
/// one independent polynomial per component. Components are bounded by 10
/// on the box.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomTensorField {
    shape: Shape,
    center: Vec<f64>,
    half_width: Vec<f64>,
    monomials: Vec<Vec<u8>>,
    coefficients: Vec<Vec<f64>>,
}

/// Bound on component magnitude of [`RandomTensorField`].
pub const RANDOM_FIELD_BOUND: f64 = 10.0;

impl RandomTensorField {
    pub fn new(shape: Shape, domain: &Domain, seed: u64) -> Self {
        let n = shape.dim();
        let monomials = monomials_upto(n, 3);
        let scale = RANDOM_FIELD_BOUND / monomials.len() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f1e1d);
        let coefficients = (0..shape.len())
            .map(|_| {
                monomials
                    .iter()
                    .map(|_| scale * rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let center = domain.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        let half_width = domain.bounds.iter().map(|&(lo, hi)| 0.5 * (hi - lo)).collect();
        Self {
            shape,
            center,
            half_width,
            monomials,
            coefficients,
        }
    }
}

fn monomials_upto(n: usize, degree: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; n]];
    let mut frontier = out.clone();
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in last..n {
                let mut e = m.clone();
                e[i] += 1;
                next.push(e);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

impl TensorField for RandomTensorField {
    fn shape(&self) -> Shape {
        self.shape.clone()
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> Tensor<S> {
        let n = self.shape.dim();
        let u: Vec<S> = (0..n)
            .map(|i| (x[i].clone() - S::from_f64(self.center[i])).scale(1.0 / self.half_width[i]))
            .collect();
        let powers: Vec<[S; 4]> = u
            .iter()
            .map(|v| {
                let v2 = v.square();
                let v3 = v2.mul_ref(v);
                [S::one(), v.clone(), v2, v3]
            })
            .collect();
        let basis: Vec<S> = self
            .monomials
            .iter()
            .map(|m| {
                let mut t = S::one();
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        t = t * &powers[i][e as usize];
                    }
                }
                t
            })
            .collect();
        let r2 = u.iter().fold(S::zero(), |acc, v| acc + v.square());
        let envelope = r2.scale(-0.5).exp();
        let data = self
            .coefficients
            .iter()
            .map(|cs| {
                let mut p = S::zero();
                for (c, b) in cs.iter().zip(&basis) {
                    p += b.scale(*c);
                }
                p * &envelope
            })
            .collect();
        Tensor::from_vec(self.shape.clone(), data).expect("random field shape")
    }
}

/// Gauge function `χ = ½ sin(0.7t + 0.4x − 0.3y + 0.9z) + ¼ txy` and its gradient.
fn gauge_gradient<S: Scalar>(x: &[S]) -> Vec<S> {
    const A: [f64; 4] = [0.7, 0.4, -0.3, 0.9];
    let mut u = S::zero();
    for (k, xi) in A.iter().zip(x) {
        u += xi.scale(*k);
    }
    let c = u.cos().scale(0.5);
    let (t, x1, y) = (&x[0], &x[1], &x[2]);
    vec![
        c.scale(A[0]) + x1.mul_ref(y).scale(0.25),
        c.scale(A[1]) + t.mul_ref(y).scale(0.25),
        c.scale(A[2]) + t.mul_ref(x1).scale(0.25),
        c.scale(A[3]),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    /// `φ = cos(k·x)`, `k_μ = (−ω, κ n̂)`, `ω² = κ² + m²`
    ScalarPlaneWave { kappa: f64, mass: f64 },
    /// `A_t = q / |x⃗|`
    CoulombFlat { charge: f64 },
    /// `A = ε₁ cos(k·x) + ε₂ sin(k·x)`
    EmPlaneWave { k: [f64; 4], e1: [f64; 4], e2: [f64; 4] },
    /// `φ = ln(1 − 2M/r)`
    StaticScalar { mass: f64 },
    /// `A_t = q / r` in the Schwarzschild chart
    CoulombSchwarzschild { charge: f64 },
    Random(RandomTensorField),
    /// Base one-form plus the gradient of a fixed gauge function.
    GaugeShifted(Box<Field>),
}

impl Field {
    /// Canonical transverse plane wave.
    pub fn em_plane_wave(scale: f64) -> Self {
        Field::EmPlaneWave {
            k: [-scale, 0.6 * scale, 0.8 * scale, 0.0],
            e1: [0.0, 0.0, 0.0, 1.0],
            e2: [0.0, 0.8, -0.6, 0.0],
        }
    }

    fn one_form<S: Scalar>(n: usize, v: Vec<S>) -> Tensor<S> {
        Tensor::from_vec(Shape::pq(n, 0, 1), v).expect("one-form shape")
    }
}

fn dot<S: Scalar>(k: &[f64], x: &[S]) -> S {
    let mut u = S::zero();
    for (ki, xi) in k.iter().zip(x) {
        u += xi.scale(*ki);
    }
    u
}

pub fn plane_wave_covector(dim: usize, kappa: f64, mass: f64) -> Vec<f64> {
    let dir = [0.6, 0.8, 0.0];
    let spatial = &dir[..dim - 1];
    let norm = spatial.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut k = vec![-(kappa * kappa + mass * mass).sqrt()];
    k.extend(spatial.iter().map(|v| kappa * v / norm));
    k
}

impl FieldConfiguration for Field {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<Tensor<S>> {
        let n = x.len();
        match self {
            Field::ScalarPlaneWave { kappa, mass } => {
                let k = plane_wave_covector(n, *kappa, *mass);
                vec![Tensor::scalar(n, dot(&k, x).cos())]
            }
            Field::CoulombFlat { charge } => {
                let r2 = x[1..].iter().fold(S::zero(), |acc, v| acc + v.square());
                let mut a = vec![S::zero(); n];
                a[0] = r2.sqrt().recip().scale(*charge);
                vec![Field::one_form(n, a)]
            }
            Field::EmPlaneWave { k, e1, e2 } => {
                let u = dot(k, x);
                let (c, s) = (u.cos(), u.sin());
                let a = (0..n).map(|i| c.scale(e1[i]) + s.scale(e2[i])).collect();
                vec![Field::one_form(n, a)]
            }
            Field::StaticScalar { mass } => {
                let f = S::one() - x[1].recip().scale(2.0 * mass);
                vec![Tensor::scalar(n, f.ln())]
            }
            Field::CoulombSchwarzschild { charge } => {
                let mut a = vec![S::zero(); n];
                a[0] = x[1].recip().scale(*charge);
                vec![Field::one_form(n, a)]
            }
            Field::Random(field) => vec![field.eval(x)],
            Field::GaugeShifted(base) => {
                let mut fields = base.eval(x);
                let shift = gauge_gradient(x);
                let a = fields[0]
                    .data()
                    .iter()
                    .zip(shift)
                    .map(|(a, d)| a.clone() + d)
                    .collect();
                fields[0] = Field::one_form(n, a);
                fields
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetricEntry {
    pub name: &'static str,
    pub metric: Metric,
    pub domain: Domain,
    pub vectors: Vec<VectorField>,
    pub flat: bool,
}

impl MetricEntry {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Point>, CatalogError> {
        sample_in(self.name, &self.domain, count, seed, |x| self.metric.contains(x))
    }

    pub fn killing_vectors(&self) -> impl Iterator<Item = &VectorField> {
        self.vectors.iter().filter(|v| v.killing)
    }

    /// Seeded random (generically non-Killing) vector fields.
    pub fn random_vectors(&self, count: usize, seed: u64) -> Vec<VectorField> {
        (0..count as u64)
            .map(|i| VectorField::random(&self.domain, seed.wrapping_mul(1_000_003).wrapping_add(i)))
            .collect()
    }

    /// Seeded random tensor field of the given type.
    pub fn random_tensor(&self, p: usize, q: usize, seed: u64) -> RandomTensorField {
        let slots = std::iter::repeat(Variance::Up)
            .take(p)
            .chain(std::iter::repeat(Variance::Down).take(q))
            .collect();
        let shape = Shape::new(self.dim(), slots).expect("shape");
        RandomTensorField::new(shape, &self.domain, seed)
    }
}

#[derive(Clone, Debug)]
pub struct FieldEntry {
    pub name: &'static str,
    pub theory: Theory,
    pub field: Field,
    pub on_shell: bool,
    pub metrics: Vec<&'static str>,
    pub min_spatial_radius: Option<f64>,
}

impl FieldEntry {
    pub fn sample_points(&self, metric: &MetricEntry, count: usize, seed: u64) -> Result<Vec<Point>, CatalogError> {
        let r0 = self.min_spatial_radius;
        let name = format!("{}/{}", metric.name, self.name);
        sample_in(&name, &metric.domain, count, seed, |x| {
            metric.metric.contains(x) && r0.map_or(true, |r0| spatial_radius(x) >= r0)
        })
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub metrics: Vec<MetricEntry>,
    pub fields: Vec<FieldEntry>,
}

fn minkowski_vectors(dim: usize) -> Vec<VectorField> {
    let axis = ["t", "x", "y", "z"];
    let mut v = Vec::new();
    for a in 0..dim {
        v.push(VectorField::new(format!("translation-{}", axis[a]), dim, VectorKind::Translation(a), true, true));
    }
    for i in 1..dim {
        for j in i + 1..dim {
            v.push(VectorField::new(
                format!("rotation-{}{}", axis[i], axis[j]),
                dim,
                VectorKind::Rotation(i, j),
                true,
                false,
            ));
        }
    }
    for i in 1..dim {
        v.push(VectorField::new(format!("boost-{}", axis[i]), dim, VectorKind::Boost(i), true, false));
    }
    v
}

pub fn catalog() -> Catalog {
    let schwarzschild_domain = Domain {
        bounds: vec![(-1.0, 1.0), (4.0, 12.0), (0.4, PI - 0.4), (0.0, 2.0 * PI)],
        min_spatial_radius: None,
    };
    let metrics = vec![
        MetricEntry {
            name: "minkowski2",
            metric: Metric::Minkowski { dim: 2 },
            domain: Domain::cube(2, 1.0),
            vectors: minkowski_vectors(2),
            flat: true,
        },
        MetricEntry {
            name: "minkowski4",
            metric: Metric::Minkowski { dim: 4 },
            domain: Domain::cube(4, 1.0),
            vectors: minkowski_vectors(4),
            flat: true,
        },
        MetricEntry {
            name: "schwarzschild",
            metric: Metric::Schwarzschild { mass: 1.0 },
            domain: schwarzschild_domain,
            vectors: vec![
                VectorField::new("time", 4, VectorKind::Translation(0), true, false),
                VectorField::new("rotation-z", 4, VectorKind::Translation(3), true, false),
                VectorField::new("rotation-x", 4, VectorKind::SphereRotationX, true, false),
                VectorField::new("rotation-y", 4, VectorKind::SphereRotationY, true, false),
            ],
            flat: false,
        },
        MetricEntry {
            name: "conformal-bump",
            metric: Metric::ConformalBump {
                amplitude: 0.3,
                width: 0.8,
            },
            domain: Domain::cube(2, 1.5),
            vectors: Vec::new(),
            flat: false,
        },
    ];
    let all: Vec<&'static str> = metrics.iter().map(|m| m.name).collect();
    let flat = vec!["minkowski2", "minkowski4"];
    let offshell = |name, theory, shape_q: usize, seed| FieldEntry {
        name,
        theory,
        // shape and box are fixed per metric in `resolve_field`
        field: Field::Random(RandomTensorField::new(
            Shape::pq(1, 0, shape_q),
            &Domain::cube(1, 1.0),
            seed,
        )),
        on_shell: false,
        metrics: all.clone(),
        min_spatial_radius: None,
    };
    let fields = vec![
        FieldEntry {
            name: "scalar-plane-wave",
            theory: Theory::Scalar { mass: 0.0 },
            field: Field::ScalarPlaneWave { kappa: 1.0, mass: 0.0 },
            on_shell: true,
            metrics: flat.clone(),
            min_spatial_radius: None,
        },
        FieldEntry {
            name: "massive-scalar-wave",
            theory: Theory::Scalar { mass: 1.0 },
            field: Field::ScalarPlaneWave { kappa: 1.0, mass: 1.0 },
            on_shell: true,
            metrics: flat.clone(),
            min_spatial_radius: None,
        },
        FieldEntry {
            name: "coulomb",
            theory: Theory::Maxwell,
            field: Field::CoulombFlat { charge: 0.5 },
            on_shell: true,
            metrics: vec!["minkowski4"],
            min_spatial_radius: Some(0.5),
        },
        FieldEntry {
            name: "plane-em-wave",
            theory: Theory::Maxwell,
            field: Field::em_plane_wave(1.0),
            on_shell: true,
            metrics: vec!["minkowski4"],
            min_spatial_radius: None,
        },
        FieldEntry {
            name: "plane-em-wave-gauged",
            theory: Theory::Maxwell,
            field: Field::GaugeShifted(Box::new(Field::em_plane_wave(1.0))),
            on_shell: true,
            metrics: vec!["minkowski4"],
            min_spatial_radius: None,
        },
        FieldEntry {
            name: "static-scalar",
            theory: Theory::Scalar { mass: 0.0 },
            field: Field::StaticScalar { mass: 1.0 },
            on_shell: true,
            metrics: vec!["schwarzschild"],
            min_spatial_radius: None,
        },
        FieldEntry {
            name: "schwarzschild-coulomb",
            theory: Theory::Maxwell,
            field: Field::CoulombSchwarzschild { charge: 0.5 },
            on_shell: true,
            metrics: vec!["schwarzschild"],
            min_spatial_radius: None,
        },
        offshell("random-scalar", Theory::Scalar { mass: 0.7 }, 0, 11),
        offshell("random-one-form", Theory::Maxwell, 1, 12),
        offshell("broken-scalar", Theory::BrokenScalar, 0, 13),
    ];
    Catalog { metrics, fields }
}

impl Catalog {
    pub fn metric(&self, name: &str) -> Result<&MetricEntry, CatalogError> {
        self.metrics
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| CatalogError::UnknownMetric(name.to_string()))
    }

    pub fn field(&self, name: &str) -> Result<&FieldEntry, CatalogError> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| CatalogError::UnknownField(name.to_string()))
    }

    /// Field entry specialised to `metric`: random fields get the metric's
    /// dimension and sampling box.
    pub fn resolve_field(&self, name: &str, metric: &MetricEntry) -> Result<FieldEntry, CatalogError> {
        let entry = self.field(name)?;
        if !entry.metrics.contains(&metric.name) {
            return Err(CatalogError::Incompatible {
                field: name.to_string(),
                metric: metric.name.to_string(),
            });
        }
        let mut entry = entry.clone();
        if let Field::Random(r) = &entry.field {
            let q = r.shape().rank();
            let seed = fnv1a(&[name, metric.name]);
            entry.field = Field::Random(RandomTensorField::new(
                Shape::pq(metric.dim(), 0, q),
                &metric.domain,
                seed,
            ));
        }
        Ok(entry)
    }

    /// On-shell `(metric, field)` pairs.
    pub fn on_shell_scenarios(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        for f in self.fields.iter().filter(|f| f.on_shell) {
            for m in &f.metrics {
                out.push((*m, f.name));
            }
        }
        out
    }
}

/// Largest residuals of the structural claims of a metric entry.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimSummary {
    pub killing: f64,
    pub parallel: f64,
    pub flatness: f64,
}

/// Checks every Killing, parallel and flatness claim at `points`.
pub fn verify_metric_claims(
    entry: &MetricEntry,
    points: &[Point],
    order: usize,
) -> Result<ClaimSummary, CatalogError> {
    let mut summary = ClaimSummary {
        killing: 0.0,
        parallel: 0.0,
        flatness: 0.0,
    };
    for p in points {
        let geo = geometry_at(&entry.metric, p, order)?;
        let x = lift(&p.coords, order)?;
        if entry.flat {
            summary.flatness = summary.flatness.max(geo.riemann.max_abs_value());
        }
        for v in &entry.vectors {
            let xi = v.eval(&x);
            if v.killing {
                let r = geo.killing_residual(&xi)?.max_abs_value();
                summary.killing = summary.killing.max(r);
                if r > CLAIM_TOLERANCE {
                    return Err(claim(format!("{}/{}", entry.name, v.name), "killing", r));
                }
            }
            if v.parallel {
                let r = geo.parallel_residual(&xi)?.max_abs_value();
                summary.parallel = summary.parallel.max(r);
                if r > CLAIM_TOLERANCE {
                    return Err(claim(format!("{}/{}", entry.name, v.name), "parallel", r));
                }
            }
        }
    }
    if summary.flatness > CLAIM_TOLERANCE {
        return Err(claim(entry.name.to_string(), "flat", summary.flatness));
    }
    Ok(summary)
}

fn claim(entry: String, claim: &'static str, residual: f64) -> CatalogError {
    CatalogError::Claim {
        entry,
        claim,
        residual,
    }
}

/// Largest EOM residual of an on-shell claim; errors above the on-shell gate.
pub fn verify_on_shell(
    metric: &MetricEntry,
    field: &FieldEntry,
    points: &[Point],
    order: usize,
) -> Result<f64, CatalogError> {
    let mut worst = 0.0f64;
    for p in points {
        let (geo, fp) = field_point(metric, field, p, order)?;
        let d = crate::field::differentiate(&field.theory, &geo, &fp);
        worst = worst.max(max_eom_residual(&geo, &fp, &d)?);
    }
    if field.on_shell && worst > crate::field::ON_SHELL_GATE {
        return Err(claim(format!("{}/{}", metric.name, field.name), "on-shell", worst));
    }
    Ok(worst)
}

/// Geometry and field jets of an entry pair at one point.
pub fn field_point(
    metric: &MetricEntry,
    field: &FieldEntry,
    p: &Point,
    order: usize,
) -> Result<(crate::geometry::GeometryPoint<f64>, FieldPoint<f64>), CatalogError> {
    let geo = geometry_at(&metric.metric, p, order)?;
    let x = lift(&p.coords, order)?;
    let values = field.field.eval(&x);
    let fp = FieldPoint::new(&field.theory, &geo, x, values)?;
    Ok((geo, fp))
}

/// Geometry, field jets and energy-momentum tensors at one point.
pub fn emt_point(
    metric: &MetricEntry,
    field: &FieldEntry,
    p: &Point,
    order: usize,
) -> Result<(crate::geometry::GeometryPoint<f64>, FieldPoint<f64>, EmtBundle<f64>), CatalogError> {
    let (geo, fp) = field_point(metric, field, p, order)?;
    let emt = EmtBundle::new(&field.theory, &geo, &fp)?;
    Ok((geo, fp, emt))
}

fn fnv1a(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes().chain(std::iter::once(0)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}
