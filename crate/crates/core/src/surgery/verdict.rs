//! Comparison of an original region against its surgered replacement.

use super::glued::Reduced;
use crate::error::Result;
use crate::functionals::{evaluate_functionals, FunctionalReport};
use crate::metric::Metric1D;
use crate::serde_ext::dec17;
use serde::{Deserialize, Serialize};

pub const VERDICT_SCHEMA_VERSION: u32 = 1;

/// Relative margins below this count as a failed strict inequality.
pub const STRICT_MARGIN: f64 = 1e-6;

/// Unordered collection of pieces, integrated piece by piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSet(pub Vec<Metric1D>);

impl Reduced for PieceSet {
    fn pieces(&self) -> &[Metric1D] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub holds: bool,
    #[serde(with = "dec17")]
    pub margin: f64,
    /// The inequality holds when `margin >= threshold`.
    #[serde(with = "dec17")]
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub schema_version: u32,
    #[serde(with = "dec17")]
    pub epsilon: f64,
    #[serde(with = "dec17")]
    pub vol_original: f64,
    #[serde(with = "dec17")]
    pub vol_glued: f64,
    #[serde(with = "dec17")]
    pub s_minus_sq_original: f64,
    #[serde(with = "dec17")]
    pub s_minus_sq_glued: f64,
    #[serde(with = "dec17")]
    pub z_sq_original: f64,
    #[serde(with = "dec17")]
    pub z_sq_glued: f64,
    #[serde(with = "dec17")]
    pub i_eps_original: f64,
    #[serde(with = "dec17")]
    pub i_eps_glued: f64,
    /// Relative volume drop.
    pub volume_decreased: Inequality,
    /// `S^2_-(original) - S^2_-(glued)`; holds when not negative beyond quadrature noise.
    pub s_floor_preserved: Inequality,
    /// Relative drop of `int |z|^2`.
    pub z_decreased: Inequality,
    /// Relative drop of `I_eps^-`.
    pub i_eps_decreased: Inequality,
}

impl ComparisonVerdict {
    pub fn all_hold(&self) -> bool {
        self.volume_decreased.holds
            && self.s_floor_preserved.holds
            && self.z_decreased.holds
            && self.i_eps_decreased.holds
    }
}

fn strict(original: f64, glued: f64) -> Inequality {
    let margin = if original != 0.0 {
        (original - glued) / original.abs()
    } else {
        -glued
    };
    Inequality {
        holds: margin >= STRICT_MARGIN,
        margin,
        threshold: STRICT_MARGIN,
    }
}

/// Compares the functionals of two regions.
pub fn compare<A: Reduced + ?Sized, B: Reduced + ?Sized>(
    original: &A,
    glued: &B,
    epsilon: f64,
) -> Result<ComparisonVerdict> {
    let o = evaluate_functionals(original, epsilon)?;
    let g = evaluate_functionals(glued, epsilon)?;
    Ok(verdict_from(&o, &g))
}

pub fn verdict_from(o: &FunctionalReport, g: &FunctionalReport) -> ComparisonVerdict {
    let s_margin = o.s2_minus - g.s2_minus;
    // quadrature noise on a vanishing integrand
    let noise = 1e-9 * (o.s2.max(g.s2)).max(1e-300);
    ComparisonVerdict {
        schema_version: VERDICT_SCHEMA_VERSION,
        epsilon: o.epsilon,
        vol_original: o.volume,
        vol_glued: g.volume,
        s_minus_sq_original: o.scalar_minus_sq,
        s_minus_sq_glued: g.scalar_minus_sq,
        z_sq_original: o.z2,
        z_sq_glued: g.z2,
        i_eps_original: o.i_eps,
        i_eps_glued: g.i_eps,
        volume_decreased: strict(o.volume, g.volume),
        s_floor_preserved: Inequality {
            holds: s_margin >= -noise,
            margin: s_margin,
            threshold: -noise,
        },
        z_decreased: strict(o.z2, g.z2),
        i_eps_decreased: strict(o.i_eps, g.i_eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{Interval, RadialFn};

    fn ball(r: f64) -> Metric1D {
        Metric1D::spherical(
            RadialFn::Affine {
                slope: 1.0,
                intercept: 0.0,
            },
            Interval::new(0.0, r).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_regions_fail_strict_checks() {
        let v = compare(&ball(1.0), &ball(1.0), 1e-3).unwrap();
        assert!(!v.volume_decreased.holds);
        assert!(v.s_floor_preserved.holds);
        assert!(!v.all_hold());
    }

    #[test]
    fn smaller_ball_has_smaller_volume() {
        let v = compare(&PieceSet(vec![ball(2.0)]), &ball(1.0), 1e-3).unwrap();
        assert!(v.volume_decreased.holds);
        assert!((v.volume_decreased.margin - 7.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn numbers_serialize_as_decimal_strings() {
        let v = compare(&ball(2.0), &ball(1.0), 1e-3).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["schema_version"], 1);
        assert!(j["vol_glued"].as_str().unwrap().contains('e'));
    }
}
