use thiserror::Error;

/// Errors raised by metric construction, evaluation and surgery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MslError {
    #[error("grid point {point} lies outside the domain [{lo}, {hi}]")]
    GridOutOfDomain { point: f64, lo: f64, hi: f64 },

    #[error("warping function is not positive at interior point {point} (value {value})")]
    WarpingNonpositiveOnGrid { point: f64, value: f64 },

    #[error("cone point at {point}: {detail}")]
    ConePoint { point: f64, detail: String },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNonconvergent { achieved: f64, requested: f64 },

    #[error("no admissible center: {0}")]
    NoCenter(String),

    #[error("geodesic radius {radius} exceeds the sphere diameter {limit}")]
    CapExceedsSphere { radius: f64, limit: f64 },

    #[error("root finding failed: {0}")]
    NoRoot(String),

    #[error("fit window [{lo}, {hi}] is too narrow: {detail}")]
    WindowTooNarrow { lo: f64, hi: f64, detail: String },

    #[error("cone angle {angle} is not below the smooth value 2*pi")]
    ConeAngleExceedsSmooth { angle: f64 },

    #[error("concave interpolant infeasible: {0}")]
    ConcaveInterpolantInfeasible(String),

    #[error("scalar curvature floor {floor} not achieved: worst value at {worst_location} misses by {margin:e}")]
    FloorUnachievable {
        floor: f64,
        worst_location: f64,
        margin: f64,
    },

    #[error("seam at {location} is not convexifying (shape operator jump {jump:e})")]
    SeamNotConvexifying { location: f64, jump: f64 },

    #[error("insufficient smoothness: {0}")]
    InsufficientSmoothness(String),

    #[error("unknown series '{0}'")]
    UnknownSeries(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, MslError>;
