use super::{argmin, label, max_abs, Ctx};
use crate::scenario::Validate;
use msl_core::metric::{default_grid_points, scalar_curvature};
use msl_core::models::CuspSpec;
use msl_core::numeric::linspace;
use msl_core::surgery::{
    band_samples, bend_core, dehn::default_bend_radius, dehn::trial_scalar_closed_form, dehn::trial_volume_integral,
    dehn_fill, smooth_fill, DehnFillSpec,
};
use msl_core::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub closed_form: f64,
    pub minimum: f64,
    pub minimum_location: f64,
    pub quadrature_error: f64,
    /// Relative spread of the volume ratio over the `t0` sweep.
    pub ratio_spread: f64,
    /// Relative seam jumps.
    pub seam: f64,
    /// Slack below `-6` allowed after smoothing.
    pub floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form: 1e-9,
            minimum: 1e-6,
            minimum_location: 1e-6,
            quadrature_error: 1e-10,
            ratio_spread: 1e-10,
            seam: 1e-12,
            floor: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub d1: f64,
    pub d2: f64,
    pub cos_angle: f64,
    pub t0: f64,
    pub slice: f64,
    pub t0_sweep: Vec<f64>,
    /// Distance from `pi/2` beyond which `s > -6` is required.
    pub interior_margin: f64,
    /// Defaults to `c1 / 10`.
    pub bend_radius: Option<f64>,
    pub tolerances: Tolerances,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            d1: 1.0,
            d2: 1.0,
            cos_angle: 0.0,
            t0: 5.0,
            slice: 1.0,
            t0_sweep: vec![3.0, 5.0, 8.0],
            interior_margin: 1e-3,
            bend_radius: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl Validate for Params {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.d1 > 0.0 && self.d2 > 0.0) {
            return Err("d1 and d2 must be positive".into());
        }
        if !(self.cos_angle.abs() < 1.0) {
            return Err("cos_angle must lie in (-1, 1)".into());
        }
        if !(self.slice > 0.0 && self.interior_margin > 0.0 && self.interior_margin < FRAC_PI_2) {
            return Err("slice and interior_margin must be positive, interior_margin below pi/2".into());
        }
        if self.t0_sweep.len() < 2 || self.t0_sweep.iter().any(|t| !t.is_finite()) {
            return Err("t0_sweep needs at least two finite values".into());
        }
        if self.bend_radius.is_some_and(|r| !(r > 0.0 && r < 1.0)) {
            return Err("bend_radius must lie in (0, 1)".into());
        }
        Ok(())
    }
}

fn spec(p: &Params, t0: f64) -> DehnFillSpec {
    let mut s = DehnFillSpec::new(CuspSpec {
        d1: p.d1,
        d2: p.d2,
        cos_angle: p.cos_angle,
        t0,
    });
    s.slice = p.slice;
    s
}

pub fn run(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let tol = &p.tolerances;
    let fill = dehn_fill(&spec(p, p.t0))?;
    let n = default_grid_points();
    let grid = linspace(0.0, FRAC_PI_2, n);
    let s = scalar_curvature(fill.torus(), &grid)?;
    let dev = max_abs(grid.iter().zip(&s).map(|(r, v)| v - trial_scalar_closed_form(*r)));
    ctx.small("scalar_closed_form", None, dev, tol.closed_form);
    let (imin, smin) = argmin(&s);
    ctx.near("scalar_minimum", None, smin, -6.0, tol.minimum);
    ctx.near(
        "scalar_minimum_location",
        None,
        grid[imin],
        FRAC_PI_2,
        tol.minimum_location,
    );
    let inside = grid
        .iter()
        .zip(&s)
        .filter(|(r, _)| **r <= FRAC_PI_2 - p.interior_margin)
        .fold(f64::INFINITY, |a, (_, v)| a.min(*v));
    ctx.above("scalar_above_floor_inside", None, inside, -6.0);

    let (integral, err) = trial_volume_integral()?;
    ctx.below("volume_integral", None, integral, 0.464);
    ctx.small("volume_quadrature_error", None, err, tol.quadrature_error);
    ctx.below("volume_ratio", None, fill.volume_ratio(), 0.928);
    let ratios = p
        .t0_sweep
        .iter()
        .map(|t| dehn_fill(&spec(p, *t)).map(|f| f.volume_ratio()))
        .collect::<Result<Vec<_>>>()?;
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    ctx.small("volume_ratio_t0_spread", None, (hi - lo) / hi.abs(), tol.ratio_spread);

    let scale = fill.c1.max(fill.c2);
    ctx.small(
        "seam_value_jump",
        None,
        max_abs(fill.seam_jumps.iter().map(|j| j.value)) / scale,
        tol.seam,
    );
    ctx.small(
        "seam_slope_jump",
        None,
        max_abs(fill.seam_jumps.iter().map(|j| j.first)) / scale,
        tol.seam,
    );
    ctx.below("cone_angle", None, fill.cone_angle, 2.0 * PI);

    let r0 = p.bend_radius.unwrap_or_else(|| default_bend_radius(&fill));
    let bent = bend_core(&fill, r0)?;
    ctx.at_most("bend_concave", None, bent.max_second_derivative, 0.0);
    let smooth = smooth_fill(&bent)?;
    ctx.above("bend_scalar_positive", label("r0", r0), smooth.bend_min_scalar, 0.0);
    ctx.at_least_within("smoothed_floor", None, smooth.min_scalar, -6.0, tol.floor);

    ctx.series("s", grid.iter().zip(&s).map(|(r, v)| vec![*r, *v]).collect());
    let torus = fill.torus();
    ctx.series(
        "warpings",
        grid.iter()
            .map(|r| {
                let a = torus.warp(0).derivs::<2>(*r);
                let b = torus.warp(1).derivs::<2>(*r);
                vec![*r, a[0], a[1], b[0], b[1]]
            })
            .collect(),
    );
    let sg = smooth.metric.grid(n)?;
    let ss = smooth.metric.scalar_curvature(&sg)?;
    ctx.series("smoothed_s", sg.iter().zip(&ss).map(|(r, v)| vec![*r, *v]).collect());
    ctx.series(
        "band",
        band_samples(&smooth.metric, 256)?
            .into_iter()
            .map(|r| r.to_vec())
            .collect(),
    );
    Ok(())
}
