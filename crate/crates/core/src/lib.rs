//! Reduced cohomogeneity-one Riemannian 3-metrics: curvature, model
//! geometries, curvature functionals and metric surgeries.

pub mod error;
pub mod functionals;
pub mod jet;
pub mod metric;
pub mod models;
pub mod numeric;
pub mod radial;
pub mod serde_ext;
pub mod surgery;

pub use error::{MslError, Result};
pub use jet::Jet;
pub use metric::{
    curvature_radius, ricci_profile, scalar_curvature, scalar_curvature_with, shape_operator, volume, volume_radius,
    Center, CenteredEstimate, CurvatureProfile, DerivativeMode, Metric1D, MetricKind, Orientation, ShapeOperator,
    Transverse,
};
pub use radial::{Interval, RadialFn, WarpFn, WarpKind};
pub use surgery::GluedMetric;
