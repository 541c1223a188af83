//! Metric surgeries: Dehn filling of cusps, sphere replacement in
//! asymptotically flat ends, seam smoothing and comparison verdicts.

pub mod collapse;
pub mod conformal;
pub mod dehn;
pub mod glued;
pub mod smoothing;
pub mod sphere;
pub mod verdict;

pub use collapse::{collapse_family, collapse_member, CollapseBase, CollapseMember};
pub use conformal::{conformal_shape_delta, ShapeDelta};
pub use dehn::{bend_core, dehn_fill, smooth_fill, BentCore, DehnFill, DehnFillSpec, SmoothedFill};
pub use glued::{GluedMetric, Reduced, Seam, SeamOrder, WarpJump};
pub use smoothing::{band_samples, smooth_seams, BandPlacement, BandReport, SmoothingOptions, SmoothingReport};
pub use sphere::{
    band_energy, sphere_surgery, tail_energy, SphereSurgery, SphereSurgerySpec, SurgerySide, BAND_ENERGY_CONSTANT,
    CORE_DENSITY_FLOOR,
};
pub use verdict::{compare, ComparisonVerdict, Inequality, PieceSet};
