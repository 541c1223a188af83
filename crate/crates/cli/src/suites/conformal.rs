use super::{case, max_abs, Ctx};
use crate::scenario::Validate;
use msl_core::functionals::{conformal_ricci, conformal_ricci_first_order};
use msl_core::models::{make_schwarzschild, SchwarzschildForm, SchwarzschildSpec};
use msl_core::numeric::{linspace, observed_orders};
use msl_core::surgery::conformal_shape_delta;
use msl_core::{Interval, Metric1D, MslError, RadialFn, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub law: f64,
    pub isotropic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            law: 1e-10,
            isotropic: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Mass of the area-radius Schwarzschild background.
    pub mass: f64,
    /// Area radius, in units of `m`, of the level set whose shape operator is perturbed.
    pub level_radius: f64,
    /// Halving sequence from `delta_start` down to `delta_stop`.
    pub delta_start: f64,
    pub delta_stop: f64,
    pub min_order: f64,
    pub tolerances: Tolerances,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            mass: 1.0,
            level_radius: 5.0,
            delta_start: 1e-2,
            delta_stop: 1e-5,
            min_order: 1.9,
            tolerances: Tolerances::default(),
        }
    }
}

impl Validate for Params {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.mass > 0.0 && self.level_radius > 2.0) {
            return Err("mass must be positive and level_radius above 2".into());
        }
        if !(self.delta_start > 0.0 && self.delta_stop > 0.0 && self.delta_stop < self.delta_start / 2.0) {
            return Err("need 0 < delta_stop < delta_start / 2".into());
        }
        if !(self.min_order > 0.0) {
            return Err("min_order must be positive".into());
        }
        Ok(())
    }
}

/// `delta_start / 2^k` down to the first value at or below `delta_stop` (within rounding).
fn deltas(p: &Params) -> Vec<f64> {
    let mut out = vec![p.delta_start];
    while *out.last().unwrap() > p.delta_stop * (1.0 + 1e-9) {
        let d = out.last().unwrap() / 2.0;
        out.push(d);
    }
    out
}

fn min_order(errors: &[f64]) -> f64 {
    observed_orders(errors)
        .into_iter()
        .fold(f64::INFINITY, |a, p| if p.is_nan() { p } else { a.min(p) })
}

pub fn run(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let m = p.mass;
    let spec = SchwarzschildSpec::new(m, SchwarzschildForm::AreaRadius);
    let area = make_schwarzschild(&spec)?
        .single()
        .cloned()
        .ok_or_else(|| MslError::InvalidInput("expected a single Schwarzschild sheet".into()))?;
    let lo = spec.arclength_at_radius(3.0 * m);
    let hi = spec.arclength_at_radius(30.0 * m);
    let region = area.restricted(Interval::new(lo, hi)?)?;
    let nu = RadialFn::Power {
        coeff: m,
        offset: m,
        exponent: -1.0,
    };
    let level = spec.arclength_at_radius(p.level_radius * m);
    let grid = linspace(lo, hi, 65);
    let ds = deltas(p);
    let mut shape_err = Vec::with_capacity(ds.len());
    let mut ricci_err = Vec::with_capacity(ds.len());
    for &d in &ds {
        shape_err.push(conformal_shape_delta(&region, &nu, d, level)?.gap.abs());
        ricci_err.push(conformal_ricci_first_order(&region, &nu, d, &grid)?);
    }
    ctx.at_least("shape_delta_order", None, min_order(&shape_err), p.min_order);
    ctx.at_least("ricci_first_order", None, min_order(&ricci_err), p.min_order);

    let u = RadialFn::constant(1.0).plus(nu.clone()).pow(2.0);
    let law = conformal_ricci(&region, &u, &grid)?;
    let scale = max_abs(law.direct.iter().flatten().copied());
    ctx.small(
        "conformal_ricci_law",
        case("schwarzschild"),
        law.max_deviation / scale,
        p.tolerances.law,
    );

    // (1 + m/2r)^4 times the flat metric, compared with the area-radius Ricci m/rho^3 (-2, 1, 1)
    let flat = Metric1D::spherical(
        RadialFn::Affine {
            slope: 1.0,
            intercept: 0.0,
        },
        Interval::new(m, 100.0 * m)?,
    )?;
    let iso = RadialFn::constant(1.0)
        .plus(RadialFn::Power {
            coeff: 0.5 * m,
            offset: 0.0,
            exponent: -1.0,
        })
        .pow(2.0);
    let fgrid = linspace(m, 100.0 * m, 257);
    let rep = conformal_ricci(&flat, &iso, &fgrid)?;
    let dev = max_abs(rep.grid.iter().zip(&rep.transformed).flat_map(|(r, ric)| {
        let k = m / (r * (1.0 + 0.5 * m / r).powi(2)).powi(3);
        [ric[0] / (-2.0 * k) - 1.0, ric[1] / k - 1.0, ric[2] / k - 1.0]
    }));
    ctx.small("isotropic_schwarzschild", None, dev, p.tolerances.isotropic);

    ctx.series(
        "errors",
        ds.iter()
            .zip(shape_err.iter().zip(&ricci_err))
            .map(|(d, (a, b))| vec![*d, *a, *b])
            .collect(),
    );
    Ok(())
}
