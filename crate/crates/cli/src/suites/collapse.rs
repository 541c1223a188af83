use super::{label, Ctx};
use crate::scenario::Validate;
use msl_core::surgery::{collapse_family, CollapseBase};
use msl_core::Result;
use serde::{Deserialize, Serialize};

/// A single value or a list, so `--eps 0.1` and `"eps": [0.1, 0.01]` both work.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub volume: f64,
    pub curvature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            volume: 1e-10,
            curvature: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub d1: f64,
    pub d2: f64,
    pub cos_angle: f64,
    /// Members compared against `eps = 1`.
    pub eps: OneOrMany,
    /// Members of the volume-radius monotonicity scan, together with `eps`.
    pub radius_sweep: Vec<f64>,
    pub tolerances: Tolerances,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            d1: 1.0,
            d2: 1.0,
            cos_angle: 0.0,
            eps: OneOrMany::Many(vec![0.1, 0.01, 0.001]),
            radius_sweep: vec![1.0, 0.1, 0.01, 0.001],
            tolerances: Tolerances::default(),
        }
    }
}

impl Validate for Params {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.d1 > 0.0 && self.d2 > 0.0 && self.cos_angle.abs() < 1.0) {
            return Err("base torus needs positive sides and |cos_angle| < 1".into());
        }
        let eps = self.eps.values();
        if eps.is_empty() || eps.iter().chain(&self.radius_sweep).any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err("collapse parameters must lie in (0, 1]".into());
        }
        Ok(())
    }
}

pub fn run(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let base = CollapseBase {
        d1: p.d1,
        d2: p.d2,
        cos_angle: p.cos_angle,
    };
    let eps = p.eps.values();
    let mut all: Vec<f64> = std::iter::once(1.0)
        .chain(eps.iter().copied())
        .chain(p.radius_sweep.iter().copied())
        .collect();
    all.sort_by(|a, b| b.total_cmp(a));
    all.dedup();
    let family = collapse_family(&base, &all)?;
    let reference = family[0].volume;
    for e in &eps {
        let m = family
            .iter()
            .find(|m| m.epsilon == *e)
            .expect("every eps is in the family");
        ctx.near_rel(
            "volume_scaling",
            label("eps", *e),
            m.volume / reference,
            e * e,
            p.tolerances.volume,
        );
    }
    let curvature = family.iter().map(|m| m.max_curvature).fold(0.0, f64::max);
    ctx.small("curvature_vanishes", None, curvature, p.tolerances.curvature);
    let growth = family
        .windows(2)
        .map(|w| w[1].volume_radius - w[0].volume_radius)
        .fold(f64::NEG_INFINITY, f64::max);
    ctx.at_most("volume_radius_monotone", None, growth, 0.0);
    let last = family.last().expect("family is not empty");
    ctx.below(
        "volume_radius_shrinks",
        label("eps", last.epsilon),
        last.volume_radius / family[0].volume_radius,
        1.0,
    );
    ctx.series(
        "family",
        family
            .iter()
            .map(|m| vec![m.epsilon, m.volume, m.volume_radius])
            .collect(),
    );
    Ok(())
}
