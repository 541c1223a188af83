use super::{label, max_abs, Ctx};
use crate::scenario::Validate;
use msl_core::models::{
    annulus_z_energy, conformal_boundary_data, fit_end_asymptotics, make_schwarzschild, solve_cap_matching, CapVariant,
    FitWindow, IsotropicChart, SchwarzschildForm, SchwarzschildSpec,
};
use msl_core::numeric::{loglog_fit, logspace};
use msl_core::surgery::{
    band_samples, sphere_surgery, ComparisonVerdict, SphereSurgerySpec, SurgerySide, BAND_ENERGY_CONSTANT,
    CORE_DENSITY_FLOOR,
};
use msl_core::{Metric1D, MslError, Result};
use serde::{Deserialize, Serialize};

fn end(m: f64, form: SchwarzschildForm) -> Result<Metric1D> {
    make_schwarzschild(&SchwarzschildSpec::new(m, form))?
        .single()
        .cloned()
        .ok_or_else(|| MslError::InvalidInput("expected a single Schwarzschild sheet".into()))
}

fn verdict_assertions(ctx: &mut Ctx, v: &ComparisonVerdict, r: f64) {
    for (name, ineq) in [
        ("verdict_volume", v.volume_decreased),
        ("verdict_s_floor", v.s_floor_preserved),
        ("verdict_z", v.z_decreased),
        ("verdict_i_eps", v.i_eps_decreased),
    ] {
        ctx.at_least(name, label("R", r), ineq.margin, ineq.threshold);
    }
}

fn positive_list(name: &str, v: &[f64]) -> std::result::Result<(), String> {
    if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(format!("{name} must be a non-empty list of positive radii"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseITolerances {
    /// Relative tolerance of the shape gap is `shape_gap_coeff * m / R`.
    pub shape_gap_coeff: f64,
    pub volume_deficit: f64,
}

impl Default for CaseITolerances {
    fn default() -> Self {
        Self {
            shape_gap_coeff: 20.0,
            volume_deficit: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseIParams {
    pub mass: f64,
    /// Sweep for the shape gap; the deficit is checked at the largest.
    pub radii: Vec<f64>,
    /// Radii of the full comparison on the area-radius end with a core.
    pub verdict_radii: Vec<f64>,
    pub epsilon: f64,
    pub band_half_width: f64,
    /// Area radius, in units of `m`, where the mirrored core is cut.
    pub core_cut: f64,
    pub band_constant: f64,
    pub core_density_floor: f64,
    pub tolerances: CaseITolerances,
}

impl Default for CaseIParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            radii: vec![100.0, 200.0, 500.0, 1000.0],
            verdict_radii: vec![100.0, 1000.0],
            epsilon: 1e-3,
            band_half_width: 1.0,
            core_cut: 10.0,
            band_constant: BAND_ENERGY_CONSTANT,
            core_density_floor: CORE_DENSITY_FLOOR,
            tolerances: CaseITolerances::default(),
        }
    }
}

impl Validate for CaseIParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.mass > 0.0 && self.epsilon > 0.0 && self.band_half_width > 0.0) {
            return Err("mass, epsilon and band_half_width must be positive".into());
        }
        if !(self.core_cut > 2.0 && self.band_constant > 0.0 && self.core_density_floor > 0.0) {
            return Err("core_cut must exceed 2 and the calibration constants must be positive".into());
        }
        positive_list("radii", &self.radii)?;
        positive_list("verdict_radii", &self.verdict_radii)
    }
}

pub fn run_case_i(p: &CaseIParams, ctx: &mut Ctx) -> Result<()> {
    let m = p.mass;
    let conformal = end(m, SchwarzschildForm::ConformallyFlat)?;
    let mut gaps = Vec::new();
    let mut deficit = None;
    let r_max = p.radii.iter().cloned().fold(0.0, f64::max);
    for &r in &p.radii {
        let mut spec = SphereSurgerySpec::new(conformal.clone(), r, SurgerySide::InsideFlatBall);
        spec.band_half_width = p.band_half_width;
        spec.epsilon = p.epsilon;
        spec.fit_window = FitWindow::for_mass(m);
        let s = sphere_surgery(&spec)?;
        ctx.near_rel(
            "shape_gap",
            label("R", r),
            s.shape_gap,
            m / (r * r),
            p.tolerances.shape_gap_coeff * m / r,
        );
        ctx.above("shape_gap_positive", label("R", r), s.shape_gap, 0.0);
        gaps.push(vec![r, s.shape_gap]);
        if r == r_max {
            deficit = s.deficit_ratio();
        }
    }
    let ratio = deficit.ok_or_else(|| MslError::InvalidInput("no volume deficit recorded".into()))?;
    ctx.near_rel(
        "volume_deficit_ratio",
        label("R", r_max),
        ratio,
        -1.5,
        p.tolerances.volume_deficit,
    );
    ctx.series("shape_gap", gaps);

    let schw = SchwarzschildSpec::new(m, SchwarzschildForm::AreaRadius);
    let area = end(m, SchwarzschildForm::AreaRadius)?;
    let core = schw.mirrored_core(p.core_cut * m)?;
    let mut band_rows = Vec::new();
    let mut density = None;
    for (k, &r) in p.verdict_radii.iter().enumerate() {
        let mut spec = SphereSurgerySpec::new(area.clone(), r, SurgerySide::InsideFlatBall);
        spec.band_half_width = p.band_half_width;
        spec.epsilon = p.epsilon;
        spec.fit_window = FitWindow::for_mass(m);
        spec.core = Some(core.clone());
        let s = sphere_surgery(&spec)?;
        let v = s.verdict.as_ref().ok_or_else(|| {
            MslError::InvalidInput(
                s.verdict_note
                    .clone()
                    .unwrap_or_else(|| "comparison unavailable".into()),
            )
        })?;
        verdict_assertions(ctx, v, r);
        ctx.at_most("band_energy", label("R", r), s.band_z2, p.band_constant / (r * r));
        band_rows.push(vec![r, s.band_z2]);
        density = density.or(s.core_z_density);
        if k == 0 {
            ctx.series(
                "band",
                band_samples(&s.glued, 256)?.into_iter().map(|x| x.to_vec()).collect(),
            );
        }
    }
    ctx.at_least("core_density", None, density.unwrap_or(f64::NAN), p.core_density_floor);
    ctx.series("z_band", band_rows);
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseIITolerances {
    pub cap_residual: f64,
    pub cap_match: f64,
    pub gap_slope: f64,
    pub z_slope: f64,
}

impl Default for CaseIITolerances {
    fn default() -> Self {
        Self {
            cap_residual: 1e-12,
            cap_match: 1e-10,
            gap_slope: 0.1,
            z_slope: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseIIParams {
    pub mass: f64,
    /// Radii of the full surgery and its comparison.
    pub radii: Vec<f64>,
    pub lambda: f64,
    pub epsilon: f64,
    pub band_half_width: f64,
    /// Range and sample count of the shape-gap slope fit.
    pub slope_range: [f64; 2],
    pub slope_points: usize,
    /// Window of the `|z|^2` decay fit.
    pub z_window: [f64; 2],
    /// Bound on band `int |z|^2` over the annulus energy.
    pub band_fraction: f64,
    pub tolerances: CaseIITolerances,
}

impl Default for CaseIIParams {
    fn default() -> Self {
        Self {
            mass: 0.5,
            radii: vec![100.0, 1000.0],
            lambda: 1.75,
            epsilon: 1e-3,
            band_half_width: 1.0,
            slope_range: [100.0, 1000.0],
            slope_points: 8,
            z_window: [10.0, 1000.0],
            band_fraction: 0.1,
            tolerances: CaseIITolerances::default(),
        }
    }
}

impl Validate for CaseIIParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.mass > 0.0 && self.epsilon > 0.0 && self.band_half_width > 0.0 && self.band_fraction > 0.0) {
            return Err("mass, epsilon, band_half_width and band_fraction must be positive".into());
        }
        if !(self.lambda > 1.5 && self.lambda < 2.0) {
            return Err("lambda must lie in (3/2, 2)".into());
        }
        positive_list("radii", &self.radii)?;
        positive_list("slope_range", &self.slope_range)?;
        positive_list("z_window", &self.z_window)?;
        if !(self.slope_range[1] > self.slope_range[0] && self.slope_points >= 3) {
            return Err("slope_range must be increasing with at least three points".into());
        }
        if !(self.z_window[1] >= 10.0 * self.z_window[0]) {
            return Err("z_window must span at least a decade".into());
        }
        Ok(())
    }
}

pub fn run_case_ii(p: &CaseIIParams, ctx: &mut Ctx) -> Result<()> {
    let m = p.mass;
    let tol = &p.tolerances;
    let conformal = end(m, SchwarzschildForm::ConformallyFlat)?;
    let window = FitWindow::for_mass(m);
    let chart = IsotropicChart::new(&conformal, window.r_max)?;
    for (k, &r) in p.radii.iter().enumerate() {
        let c1 = solve_cap_matching(r, CapVariant::C1, m)?;
        let (rho, sigma) = conformal_boundary_data(r, m);
        ctx.small("cap_c1_residual", label("R", r), max_abs(c1.residual), tol.cap_residual);
        let th = c1.delta * c1.radius;
        ctx.near_rel(
            "cap_boundary_radius",
            label("R", r),
            th.sin() / c1.delta,
            rho,
            tol.cap_match,
        );
        ctx.near_rel(
            "cap_shape_operator",
            label("R", r),
            c1.shape_operator(),
            sigma / rho,
            tol.cap_match,
        );

        let mut spec = SphereSurgerySpec::new(conformal.clone(), r, SurgerySide::OutsideSphereCap);
        spec.lambda = p.lambda;
        spec.epsilon = p.epsilon;
        spec.band_half_width = p.band_half_width;
        spec.fit_window = window;
        let s = sphere_surgery(&spec)?;
        ctx.above("mismatch_gap_positive", label("R", r), s.shape_gap, 0.0);
        let annulus = annulus_z_energy(&conformal, &chart, r, 2.0 * r)?;
        ctx.below("band_fraction", label("R", r), s.band_z2 / annulus, p.band_fraction);
        if let Some(v) = &s.verdict {
            verdict_assertions(ctx, v, r);
        }
        if k == 0 {
            ctx.series(
                "band",
                band_samples(&s.glued, 256)?.into_iter().map(|x| x.to_vec()).collect(),
            );
        }
    }

    let rs = logspace(p.slope_range[0], p.slope_range[1], p.slope_points);
    let mut gaps = Vec::with_capacity(rs.len());
    for &r in &rs {
        let cap = solve_cap_matching(r, CapVariant::Mismatch { lambda: p.lambda }, m)?;
        let (rho, sigma) = conformal_boundary_data(r, m);
        gaps.push(sigma / rho - cap.shape_operator());
    }
    let fit = loglog_fit(&rs, &gaps)?;
    ctx.near("mismatch_gap_slope", None, fit.slope, -(1.0 + p.lambda), tol.gap_slope);
    ctx.series("shape_gap", rs.iter().zip(&gaps).map(|(r, g)| vec![*r, *g]).collect());

    let area = end(m, SchwarzschildForm::AreaRadius)?;
    let asym = fit_end_asymptotics(&area, FitWindow::new(p.z_window[0], p.z_window[1]))?;
    ctx.near(
        "z_decay_slope",
        None,
        asym.z_decay_slope.unwrap_or(f64::NAN),
        -3.0,
        tol.z_slope,
    );
    let area_chart = IsotropicChart::new(&area, p.z_window[1])?;
    let zr = logspace(p.z_window[0], p.z_window[1], 9);
    let rows = zr
        .iter()
        .map(|r| annulus_z_energy(&area, &area_chart, *r, 2.0 * r).map(|e| vec![*r, e]))
        .collect::<Result<Vec<_>>>()?;
    ctx.series("z_annulus", rows);
    Ok(())
}
