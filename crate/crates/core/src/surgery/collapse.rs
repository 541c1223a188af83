//! Flat torus bundles over an interval with shrinking fibres: volume
//! collapse with curvature identically zero.

use crate::error::{MslError, Result};
use crate::metric::{self, volume_radius, Center, Metric1D};
use crate::numeric::linspace;
use crate::radial::{Interval, RadialFn};
use crate::serde_ext::dec17;
use serde::{Deserialize, Serialize};

/// `mu` in the volume radius.
pub const VOLUME_RADIUS_MU: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseBase {
    pub d1: f64,
    pub d2: f64,
    pub cos_angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseMember {
    #[serde(with = "dec17")]
    pub epsilon: f64,
    pub metric: Metric1D,
    #[serde(with = "dec17")]
    pub volume: f64,
    /// Largest Ricci eigenvalue magnitude on the grid.
    #[serde(with = "dec17")]
    pub max_curvature: f64,
    /// Centered-ball volume radius at the middle level.
    #[serde(with = "dec17")]
    pub volume_radius: f64,
}

pub fn collapse_member(base: &CollapseBase, epsilon: f64) -> Result<CollapseMember> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(MslError::InvalidInput(format!(
            "collapse parameter {epsilon} must lie in (0, 1]"
        )));
    }
    let m = Metric1D::doubly_warped(
        RadialFn::constant(epsilon * base.d1),
        RadialFn::constant(epsilon * base.d2),
        base.cos_angle,
        Interval::new(0.0, 1.0)?,
    )?;
    let volume = metric::volume(&m, None)?;
    let grid = linspace(0.0, 1.0, 65);
    let profile = metric::ricci_profile(&m, &grid)?;
    let max_curvature = profile.ricci.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let nu = volume_radius(&m, Center::Level { x: 0.5 }, VOLUME_RADIUS_MU)?;
    Ok(CollapseMember {
        epsilon,
        metric: m,
        volume,
        max_curvature,
        volume_radius: nu.radius,
    })
}

pub fn collapse_family(base: &CollapseBase, epsilons: &[f64]) -> Result<Vec<CollapseMember>> {
    epsilons.iter().map(|&e| collapse_member(base, e)).collect()
}
