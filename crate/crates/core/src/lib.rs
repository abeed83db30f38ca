//! Tensor calculus on jets: the tilde operator, Levi-Civita geometry, Lie
//! derivatives and the canonical, metric and Belinfante energy-momentum
//! tensors of tensor field theories, evaluated pointwise with exact
//! derivatives.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix the
//! common `f64` instantiations.

pub mod dual;
pub mod field;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod scalar;
pub mod scenarios;
pub mod tensor;
pub mod tilde;
pub mod variational;

pub use dual::Dual;
pub use field::{EmtBundle, FieldConfiguration, FieldPoint, Lagrangian, Theory};
pub use geometry::{geometry_at, GeometryPoint, MetricField, Point, TensorField};
pub use jet::{lift, Jet, JetError};
pub use scalar::{Real, Scalar};
pub use tensor::{IndexOp, Shape, Tensor, TensorError, Variance};
pub use tilde::{levi_civita, tilde, tilde_product_rule_residual};

pub type Jet64 = Jet<f64>;
pub type Jet32 = Jet<f32>;
pub type Tensor64 = Tensor<f64>;
pub type JetTensor64 = Tensor<Jet<f64>>;
pub type Geometry64 = GeometryPoint<f64>;
pub type Emt64 = EmtBundle<f64>;
