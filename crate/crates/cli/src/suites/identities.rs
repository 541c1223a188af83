use super::{argmin, case, max_abs, Ctx};
use crate::scenario::Validate;
use msl_core::functionals::{
    evaluate_functionals, l_star, scale_invariance_check, static_vacuum_residual, zc2_residual,
};
use msl_core::metric::{default_grid_points, ricci_profile, scalar_curvature, shape_operator, volume, Orientation};
use msl_core::models::{
    cusp_volume, fit_end_asymptotics, make_cusp, make_schwarzschild, CuspSpec, FitWindow, SchwarzschildForm,
    SchwarzschildModel, SchwarzschildSpec,
};
use msl_core::numeric::linspace;
use msl_core::surgery::{dehn_fill, DehnFillSpec};
use msl_core::{Interval, Metric1D, MslError, RadialFn, Result};
use serde::{Deserialize, Serialize};

fn single(spec: &SchwarzschildSpec) -> Result<Metric1D> {
    make_schwarzschild(spec)?
        .single()
        .cloned()
        .ok_or_else(|| MslError::InvalidInput("expected a single Schwarzschild sheet".into()))
}

/// Arclength grid of `spec` between radii `lo m` and `hi m` of its own radial coordinate.
fn radius_grid(spec: &SchwarzschildSpec, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let m = spec.mass;
    linspace(spec.arclength_at_radius(lo * m), spec.arclength_at_radius(hi * m), n)
}

fn check_range(name: &str, r: [f64; 2], min: f64) -> std::result::Result<(), String> {
    if !(r[0] >= min && r[1] > r[0] && r[1].is_finite()) {
        return Err(format!("{name} must be an increasing pair starting at or above {min}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchwarzschildTolerances {
    pub horizon_curvature: f64,
    pub horizon_shape: f64,
    pub seam: f64,
    pub scalar: f64,
    pub residual: f64,
    pub mass_fit: f64,
}

impl Default for SchwarzschildTolerances {
    fn default() -> Self {
        Self {
            horizon_curvature: 1e-8,
            horizon_shape: 1e-8,
            seam: 1e-12,
            scalar: 1e-8,
            residual: 1e-6,
            mass_fit: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchwarzschildParams {
    pub mass: f64,
    /// Area radii, in units of `m`, of the vacuum scan.
    pub area_range: [f64; 2],
    /// Chart radii, in units of `m`, of the conformally flat scan.
    pub conformal_range: [f64; 2],
    pub tolerances: SchwarzschildTolerances,
}

impl Default for SchwarzschildParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            area_range: [2.1, 100.0],
            conformal_range: [1.0, 1000.0],
            tolerances: SchwarzschildTolerances::default(),
        }
    }
}

impl Validate for SchwarzschildParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err("mass must be positive".into());
        }
        check_range("area_range", self.area_range, 2.0)?;
        check_range("conformal_range", self.conformal_range, f64::MIN_POSITIVE)
    }
}

pub fn run_schwarzschild(p: &SchwarzschildParams, ctx: &mut Ctx) -> Result<()> {
    let m = p.mass;
    let tol = &p.tolerances;
    let n = default_grid_points();
    let spec = SchwarzschildSpec::new(m, SchwarzschildForm::AreaRadius);
    let area = single(&spec)?;
    ctx.near_rel(
        "horizon_gauss_curvature",
        None,
        area.level_gauss_curvature(0.0),
        1.0 / (4.0 * m * m),
        tol.horizon_curvature,
    );
    let a = shape_operator(&area, 0.0, Orientation::Increasing)?;
    ctx.small(
        "horizon_shape_operator",
        None,
        max_abs(a.eigenvalues.iter().map(|e| e.value)) * m,
        tol.horizon_shape,
    );
    let doubled = SchwarzschildSpec { doubled: true, ..spec };
    let SchwarzschildModel::Doubled(g) = make_schwarzschild(&doubled)? else {
        return Err(MslError::InvalidInput("expected a doubled Schwarzschild metric".into()));
    };
    let jump = max_abs(
        g.seams[0]
            .jumps
            .iter()
            .flat_map(|j| [j.value / m, j.first, j.second * m]),
    );
    ctx.small("doubled_seam_jump", None, jump, tol.seam);

    let grid = radius_grid(&spec, p.area_range[0], p.area_range[1], n);
    let s = scalar_curvature(&area, &grid)?;
    ctx.small("vacuum_scalar", None, max_abs(s.iter().copied()) * m * m, tol.scalar);
    let res = static_vacuum_residual(&area, &spec.potential(), &grid)?;
    ctx.small("static_vacuum_residual", None, res.sup_norm() * m * m, tol.residual);

    let cspec = SchwarzschildSpec::new(m, SchwarzschildForm::ConformallyFlat);
    let conformal = single(&cspec)?;
    let cgrid = radius_grid(&cspec, p.conformal_range[0], p.conformal_range[1], n);
    let cs = scalar_curvature(&conformal, &cgrid)?;
    ctx.above("conformal_scalar_positive", None, argmin(&cs).1, 0.0);

    let fit = fit_end_asymptotics(&area, FitWindow::for_mass(m))?;
    ctx.near_rel("end_mass_fit", None, fit.mass, m, tol.mass_fit);

    ctx.series("s", cgrid.iter().zip(&cs).map(|(t, v)| vec![*t, *v]).collect());
    ctx.series(
        "warpings",
        grid.iter()
            .map(|t| {
                let d = area.warp(0).derivs::<2>(*t);
                vec![*t, d[0], d[1]]
            })
            .collect(),
    );
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CuspTolerances {
    pub ricci: f64,
    pub volume: f64,
    pub s_minus_sq: f64,
    pub z: f64,
    pub l_star: f64,
}

impl Default for CuspTolerances {
    fn default() -> Self {
        Self {
            ricci: 1e-9,
            volume: 1e-10,
            s_minus_sq: 1e-9,
            z: 1e-12,
            l_star: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CuspParams {
    pub d1: f64,
    pub d2: f64,
    pub cos_angle: f64,
    pub t0: f64,
    /// Length of the slice used for integrals and scans.
    pub length: f64,
    pub tolerances: CuspTolerances,
}

impl Default for CuspParams {
    fn default() -> Self {
        Self {
            d1: 1.0,
            d2: 1.0,
            cos_angle: 0.0,
            t0: 1.0,
            length: 10.0,
            tolerances: CuspTolerances::default(),
        }
    }
}

impl Validate for CuspParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.d1 > 0.0 && self.d2 > 0.0 && self.cos_angle.abs() < 1.0 && self.t0.is_finite()) {
            return Err("cusp needs positive d1, d2, finite t0 and |cos_angle| < 1".into());
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err("length must be positive".into());
        }
        Ok(())
    }
}

fn cusp_spec(p: &CuspParams) -> CuspSpec {
    CuspSpec {
        d1: p.d1,
        d2: p.d2,
        cos_angle: p.cos_angle,
        t0: p.t0,
    }
}

fn l_star_of_one_deviation(m: &Metric1D, grid: &[f64]) -> Result<f64> {
    let l = l_star(m, &RadialFn::constant(1.0), grid)?;
    Ok(max_abs(l.iter().flat_map(|v| {
        [v.radial - 2.0, v.tangential[0] - 2.0, v.tangential[1] - 2.0]
    })))
}

pub fn run_cusp(p: &CuspParams, ctx: &mut Ctx) -> Result<()> {
    let tol = &p.tolerances;
    let spec = cusp_spec(p);
    let cusp = make_cusp(&spec)?;
    let slice = cusp.restricted(Interval::new(p.t0, p.t0 + p.length)?)?;
    let grid = linspace(p.t0, p.t0 + p.length, default_grid_points());
    let prof = ricci_profile(&slice, &grid)?;
    ctx.small(
        "ricci_eigenvalues",
        None,
        max_abs(prof.ricci.iter().flatten().map(|v| v + 2.0)),
        tol.ricci,
    );
    ctx.small(
        "scalar_curvature",
        None,
        max_abs(prof.scalar.iter().map(|v| v + 6.0)),
        tol.ricci,
    );
    ctx.near_rel("volume", None, volume(&cusp, None)?, cusp_volume(&spec), tol.volume);
    let f = evaluate_functionals(&slice, 1e-3)?;
    ctx.near_rel("s_minus_sq", None, f.scalar_minus_sq, 36.0 * f.volume, tol.s_minus_sq);
    ctx.small("z_vanishes", None, f.z2, tol.z);
    ctx.small(
        "l_star_of_one",
        None,
        l_star_of_one_deviation(&slice, &grid)?,
        tol.l_star,
    );
    ctx.series("s", grid.iter().zip(&prof.scalar).map(|(t, v)| vec![*t, *v]).collect());
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionalTolerances {
    pub decomposition: f64,
    pub invariance: f64,
}

impl Default for FunctionalTolerances {
    fn default() -> Self {
        Self {
            decomposition: 1e-12,
            invariance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionalParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub mass: f64,
    /// Cut of the cusp filled by the solid torus.
    pub t0: f64,
    pub tolerances: FunctionalTolerances,
}

impl Default for FunctionalParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            lambda: 2.0,
            mass: 1.0,
            t0: 5.0,
            tolerances: FunctionalTolerances::default(),
        }
    }
}

impl Validate for FunctionalParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.epsilon > 0.0 && self.lambda > 0.0 && self.mass > 0.0 && self.t0.is_finite()) {
            return Err("epsilon, lambda and mass must be positive".into());
        }
        Ok(())
    }
}

/// Three catalog regions with different signs of `s`.
fn catalog_regions(p: &FunctionalParams) -> Result<Vec<(&'static str, Metric1D)>> {
    let cusp = make_cusp(&CuspSpec {
        d1: 1.0,
        d2: 1.0,
        cos_angle: 0.0,
        t0: 1.0,
    })?
    .restricted(Interval::new(1.0, 11.0)?)?;
    let fill = dehn_fill(&DehnFillSpec::new(CuspSpec {
        d1: 1.0,
        d2: 1.0,
        cos_angle: 0.0,
        t0: p.t0,
    }))?;
    let cspec = SchwarzschildSpec::new(p.mass, SchwarzschildForm::ConformallyFlat);
    let annulus = single(&cspec)?.restricted(Interval::new(
        cspec.arclength_at_radius(3.0 * p.mass),
        cspec.arclength_at_radius(30.0 * p.mass),
    )?)?;
    Ok(vec![
        ("cusp", cusp),
        ("solid_torus", fill.torus().clone()),
        ("conformal_annulus", annulus),
    ])
}

pub fn run_functionals(p: &FunctionalParams, ctx: &mut Ctx) -> Result<()> {
    let tol = &p.tolerances;
    for (name, m) in catalog_regions(p)? {
        let f = evaluate_functionals(&m, p.epsilon)?;
        let expected = f.s2_minus + p.epsilon * f.volume.cbrt() * f.z2;
        ctx.near_rel("i_eps_decomposition", case(name), f.i_eps, expected, tol.decomposition);
        let inv = scale_invariance_check(&m, p.lambda, p.epsilon)?;
        ctx.small("s2_scale_invariance", case(name), inv.s2_deviation, tol.invariance);
        ctx.small(
            "s2_minus_scale_invariance",
            case(name),
            inv.s2_minus_deviation,
            tol.invariance,
        );
        ctx.small(
            "i_eps_scale_invariance",
            case(name),
            inv.i_eps_deviation,
            tol.invariance,
        );
        ctx.small("z2_scaling", case(name), inv.z2_deviation, tol.invariance);
        ctx.small("volume_scaling", case(name), inv.volume_deviation, tol.invariance);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualTolerances {
    pub residual: f64,
    pub flat: f64,
    pub l_star: f64,
}

impl Default for ResidualTolerances {
    fn default() -> Self {
        Self {
            residual: 1e-6,
            flat: 1e-12,
            l_star: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualParams {
    pub mass: f64,
    /// Coupling of the flat-space check.
    pub alpha: f64,
    pub area_range: [f64; 2],
    pub tolerances: ResidualTolerances,
}

impl Default for ResidualParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            alpha: 0.1,
            area_range: [2.1, 100.0],
            tolerances: ResidualTolerances::default(),
        }
    }
}

impl Validate for ResidualParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.mass > 0.0 && self.alpha.is_finite()) {
            return Err("mass must be positive and alpha finite".into());
        }
        check_range("area_range", self.area_range, 2.0)
    }
}

pub fn run_residuals(p: &ResidualParams, ctx: &mut Ctx) -> Result<()> {
    let m = p.mass;
    let tol = &p.tolerances;
    let n = default_grid_points();
    let spec = SchwarzschildSpec::new(m, SchwarzschildForm::AreaRadius);
    let area = single(&spec)?;
    let grid = radius_grid(&spec, p.area_range[0], p.area_range[1], n);
    let u = spec.potential();
    let sv = static_vacuum_residual(&area, &u, &grid)?;
    ctx.small("static_vacuum", None, sv.sup_norm() * m * m, tol.residual);
    let z0 = zc2_residual(&area, &u, 0.0, &grid)?;
    ctx.small("zc2_static_limit", None, z0.sup_norm() * m * m, tol.residual);

    let flat = Metric1D::spherical(
        RadialFn::Affine {
            slope: 1.0,
            intercept: 0.0,
        },
        Interval::new(1.0, 10.0)?,
    )?;
    let fz = zc2_residual(&flat, &RadialFn::constant(1.0), p.alpha, &linspace(1.0, 10.0, 257))?;
    ctx.small("zc2_flat", None, fz.sup_norm(), tol.flat);

    let cusp = make_cusp(&CuspSpec {
        d1: 1.0,
        d2: 1.0,
        cos_angle: 0.0,
        t0: 0.0,
    })?
    .restricted(Interval::new(0.0, 10.0)?)?;
    ctx.small(
        "l_star_cusp",
        None,
        l_star_of_one_deviation(&cusp, &linspace(0.0, 10.0, 257))?,
        tol.l_star,
    );

    let l = l_star(&area, &u, &grid)?;
    ctx.series(
        "residual",
        l.iter()
            .map(|v| vec![v.point, max_abs([v.radial, v.tangential[0], v.tangential[1]])])
            .collect(),
    );
    Ok(())
}
