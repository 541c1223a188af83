//! Model geometries: Schwarzschild ends, hyperbolic cusps, round caps and
//! flat tori, plus asymptotic fitting of spherically symmetric ends.

use crate::error::{MslError, Result};
use crate::metric::{Metric1D, MetricKind};
use crate::numeric::{self, brent, integrate, least_squares, loglog_fit, newton2, QuadOptions};
use crate::radial::{schwarzschild_t_of_eta, Interval, RadialFn};
use crate::serde_ext::dec17;
use crate::surgery::glued::{GluedMetric, SeamOrder};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchwarzschildForm {
    /// `(1 - 2m/r)^(-1) dr^2 + r^2 dOmega^2`, arclength measured from the horizon.
    AreaRadius,
    /// `(1 + 2m/r)(dr^2 + r^2 dOmega^2)`, arclength measured from `r = 0`.
    ConformallyFlat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwarzschildSpec {
    pub mass: f64,
    pub form: SchwarzschildForm,
    #[serde(default)]
    pub doubled: bool,
}

pub enum SchwarzschildModel {
    Single(Metric1D),
    Doubled(GluedMetric),
}

impl SchwarzschildModel {
    pub fn single(&self) -> Option<&Metric1D> {
        match self {
            SchwarzschildModel::Single(m) => Some(m),
            SchwarzschildModel::Doubled(_) => None,
        }
    }
}

impl SchwarzschildSpec {
    pub fn new(mass: f64, form: SchwarzschildForm) -> Self {
        Self {
            mass,
            form,
            doubled: false,
        }
    }

    /// The mass-normalized member `m = 1/2`.
    pub fn normalized(form: SchwarzschildForm) -> Self {
        Self::new(0.5, form)
    }

    pub fn warping(&self) -> RadialFn {
        match self.form {
            SchwarzschildForm::AreaRadius => RadialFn::SchwarzschildArea { mass: self.mass },
            SchwarzschildForm::ConformallyFlat => RadialFn::SchwarzschildConformal { mass: self.mass },
        }
    }

    /// Static potential of the area-radius form.
    pub fn potential(&self) -> RadialFn {
        RadialFn::SchwarzschildPotential { mass: self.mass }
    }

    /// Arclength coordinate at which the form's own radial coordinate equals `r`.
    pub fn arclength_at_radius(&self, r: f64) -> f64 {
        let m = self.mass;
        let eta = match self.form {
            SchwarzschildForm::AreaRadius => (r / (2.0 * m)).sqrt().max(1.0).acosh(),
            SchwarzschildForm::ConformallyFlat => (r / (2.0 * m)).sqrt().asinh(),
        };
        schwarzschild_t_of_eta(eta, m)
    }

    /// The form's own radial coordinate at arclength `t`.
    pub fn radius_at_arclength(&self, t: f64) -> f64 {
        match self.form {
            SchwarzschildForm::AreaRadius => RadialFn::SchwarzschildArea { mass: self.mass }.eval(t),
            SchwarzschildForm::ConformallyFlat => RadialFn::SchwarzschildChartRadius { mass: self.mass }.eval(t),
        }
    }

    /// Mirror image of the area-radius sheet between the horizon and area
    /// radius `r_cut`, on `[-t(r_cut), 0]`.
    pub fn mirrored_core(&self, r_cut: f64) -> Result<Metric1D> {
        if self.form != SchwarzschildForm::AreaRadius {
            return Err(MslError::InvalidInput("only the area-radius form has a horizon".into()));
        }
        let t = self.arclength_at_radius(r_cut);
        Metric1D::spherical(self.warping(), Interval::new(-t, 0.0)?)
    }
}

pub fn make_schwarzschild(spec: &SchwarzschildSpec) -> Result<SchwarzschildModel> {
    if !(spec.mass > 0.0) {
        return Err(MslError::InvalidInput(format!("mass {} must be positive", spec.mass)));
    }
    let f = spec.warping();
    let outer = Metric1D::spherical(f.clone(), Interval::new(0.0, f64::INFINITY)?)?;
    if !spec.doubled {
        return Ok(SchwarzschildModel::Single(outer));
    }
    if spec.form != SchwarzschildForm::AreaRadius {
        return Err(MslError::InvalidInput(
            "only the area-radius form doubles across a horizon".into(),
        ));
    }
    let inner = Metric1D::spherical(f, Interval::new(f64::NEG_INFINITY, 0.0)?)?;
    Ok(SchwarzschildModel::Doubled(GluedMetric::new(
        vec![inner, outer],
        vec![SeamOrder::C2],
    )?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspSpec {
    pub d1: f64,
    pub d2: f64,
    pub cos_angle: f64,
    pub t0: f64,
}

/// Cusp `dt^2 + e^(-2t)(d1^2 (1 - a^2) dth1^2 + d2^2 dth2^2)` on `[t0, inf)`.
pub fn make_cusp(spec: &CuspSpec) -> Result<Metric1D> {
    if !(spec.d1 > 0.0 && spec.d2 > 0.0) {
        return Err(MslError::InvalidInput("cusp torus sides must be positive".into()));
    }
    Metric1D::doubly_warped(
        RadialFn::Exponential {
            scale: spec.d1,
            rate: -1.0,
        },
        RadialFn::Exponential {
            scale: spec.d2,
            rate: -1.0,
        },
        spec.cos_angle,
        Interval::new(spec.t0, f64::INFINITY)?,
    )
}

/// Volume of the cusp beyond `t0`.
pub fn cusp_volume(spec: &CuspSpec) -> f64 {
    (2.0 * PI).powi(2) * spec.d1 * spec.d2 * (1.0 - spec.cos_angle.powi(2)).sqrt() * (-2.0 * spec.t0).exp() / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereCapSpec {
    pub delta: f64,
    /// Geodesic radius `D` of the cap boundary.
    pub radius: f64,
    /// The complement `[D, pi/delta]` instead of the cap `[0, D]`.
    #[serde(default)]
    pub complement: bool,
}

pub fn make_sphere_cap(spec: &SphereCapSpec) -> Result<Metric1D> {
    if !(spec.delta > 0.0 && spec.radius > 0.0) {
        return Err(MslError::InvalidInput(
            "cap curvature and radius must be positive".into(),
        ));
    }
    let limit = PI / spec.delta;
    if spec.radius >= limit {
        return Err(MslError::CapExceedsSphere {
            radius: spec.radius,
            limit,
        });
    }
    let f = RadialFn::Sine {
        radius: 1.0 / spec.delta,
        phase: 0.0,
    };
    let dom = if spec.complement {
        Interval::new(spec.radius, limit)?
    } else {
        Interval::new(0.0, spec.radius)?
    };
    Metric1D::spherical(f, dom)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CapVariant {
    /// Radius and shape operator both match.
    C1,
    /// Radius matches; the cap's boundary slope is lowered by `R^(-lambda)`.
    Mismatch { lambda: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapSolution {
    #[serde(with = "dec17")]
    pub delta: f64,
    /// Geodesic radius `D` of the matching sphere in the round metric.
    #[serde(with = "dec17")]
    pub radius: f64,
    pub residual: [f64; 2],
    pub iterations: usize,
    pub method: String,
    /// `delta^2 R^3`, expected to stay of order one.
    #[serde(with = "dec17")]
    pub delta_sq_r_cubed: f64,
    #[serde(with = "dec17")]
    pub boundary_radius: f64,
    #[serde(with = "dec17")]
    pub boundary_slope: f64,
}

impl CapSolution {
    /// Shape operator of the cap sphere, normal pointing away from the cap center.
    pub fn shape_operator(&self) -> f64 {
        let th = self.delta * self.radius;
        self.delta * th.cos() / th.sin()
    }
}

/// Solves `sin(delta D) = delta rho`, `cos(delta D) = sigma - mismatch` for the
/// round sphere of curvature `delta^2` matching a sphere of area radius `rho`
/// and radial slope `sigma`. `r_scale` sets the mismatch `r_scale^(-lambda)`
/// and the Newton starting point.
pub fn solve_cap_for_boundary(rho: f64, sigma: f64, r_scale: f64, variant: CapVariant) -> Result<CapSolution> {
    let target = match variant {
        CapVariant::C1 => sigma,
        CapVariant::Mismatch { lambda } => {
            if !(lambda > 1.5 && lambda < 2.0) {
                return Err(MslError::InvalidInput(format!(
                    "mismatch exponent {lambda} must lie in (3/2, 2)"
                )));
            }
            sigma - r_scale.powf(-lambda)
        }
    };
    if !(target > 0.0 && target < 1.0) {
        return Err(MslError::NoRoot(format!(
            "boundary slope {target} outside (0, 1); no cap of less than a hemisphere matches"
        )));
    }
    let sys = |x: [f64; 2]| {
        let (d, big) = (x[0], x[1]);
        let th = d * big;
        let (s, c) = th.sin_cos();
        ([s - d * rho, c - target], [[big * c - rho, d * c], [-big * s, -d * s]])
    };
    let finish = |d: f64, big: f64, residual: [f64; 2], iterations: usize, method: &str| CapSolution {
        delta: d,
        radius: big,
        residual,
        iterations,
        method: method.into(),
        delta_sq_r_cubed: d * d * r_scale.powi(3),
        boundary_radius: rho,
        boundary_slope: sigma,
    };
    let start = [r_scale.powf(-1.5), r_scale];
    if let Ok(sol) = newton2(sys, start, 1e-13, 200) {
        let th = sol.x[0] * sol.x[1];
        if sol.x[0] > 0.0 && th > 0.0 && th <= PI / 2.0 {
            return Ok(finish(sol.x[0], sol.x[1], sol.residual, sol.iterations, "newton"));
        }
    }
    let th = brent(|t: f64| t.cos() - target, 0.0, PI / 2.0, 1e-16).map_err(|e| {
        MslError::NoRoot(format!(
            "Newton from delta = R^(-3/2), D = R failed and the angle bracket failed: {e}"
        ))
    })?;
    let d = th.sin() / rho;
    let big = th / d;
    let (r, _) = sys([d, big]);
    Ok(finish(d, big, r, 0, "bracket"))
}

/// Boundary radius and slope of `g_S = (1 + 2m/r) delta` at chart radius `R`.
pub fn conformal_boundary_data(r: f64, m: f64) -> (f64, f64) {
    (r * (1.0 + 2.0 * m / r).sqrt(), (r + m) / (r + 2.0 * m))
}

/// Matches a round cap to the sphere `S^2(R)` of `g_S` with mass `m`.
pub fn solve_cap_matching(r: f64, variant: CapVariant, m: f64) -> Result<CapSolution> {
    if !(r > 0.0 && m >= 0.0) {
        return Err(MslError::InvalidInput(
            "radius must be positive and mass non-negative".into(),
        ));
    }
    let (rho, sigma) = conformal_boundary_data(r, m);
    solve_cap_for_boundary(rho, sigma, r, variant)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatTorus {
    pub d1: f64,
    pub d2: f64,
    pub cos_angle: f64,
}

impl FlatTorus {
    pub fn area(&self) -> f64 {
        (2.0 * PI).powi(2) * self.d1 * self.d2 * (1.0 - self.cos_angle.powi(2)).sqrt()
    }

    /// Gram matrix of the generating translations.
    pub fn gram(&self) -> [[f64; 2]; 2] {
        let a = self.cos_angle;
        let (l1, l2) = (2.0 * PI * self.d1, 2.0 * PI * self.d2);
        [[l1 * l1, a * l1 * l2], [a * l1 * l2, l2 * l2]]
    }
}

pub fn flat_torus(d1: f64, d2: f64, cos_angle: f64) -> Result<FlatTorus> {
    if !(d1 > 0.0 && d2 > 0.0 && cos_angle.abs() < 1.0) {
        return Err(MslError::InvalidInput(
            "flat torus needs positive sides and |a| < 1".into(),
        ));
    }
    Ok(FlatTorus { d1, d2, cos_angle })
}

/// Isotropic radius of a spherically symmetric end, normalized so that
/// `rho / f -> 1` at infinity.
pub struct IsotropicChart<'a> {
    metric: &'a Metric1D,
    anchor: f64,
    anchor_phi: f64,
}

impl<'a> IsotropicChart<'a> {
    pub fn new(metric: &'a Metric1D, anchor: f64) -> Result<Self> {
        if metric.kind != MetricKind::SphericallySymmetric || metric.domain.hi.is_finite() {
            return Err(MslError::InvalidInput(
                "isotropic chart needs a spherically symmetric end".into(),
            ));
        }
        let mut c = Self {
            metric,
            anchor,
            anchor_phi: 0.0,
        };
        c.anchor_phi = integrate(|x| c.integrand(x), anchor, f64::INFINITY, Self::opts())?.value;
        Ok(c)
    }

    fn opts() -> QuadOptions {
        QuadOptions {
            abs_tol: 1e-17,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }

    fn integrand(&self, x: f64) -> f64 {
        let loc = self.metric.local::<2>(x);
        let f = loc.f[0];
        (f.derivative(1) - 1.0) / f.value() * self.metric.lapse(x)
    }

    /// `int_t^inf (f' - 1)/f ds`
    pub fn phi(&self, t: f64) -> Result<f64> {
        Ok(self.anchor_phi + integrate(|x| self.integrand(x), t, self.anchor, Self::opts())?.value)
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        Ok(self.metric.warp(0).eval(t) * self.phi(t)?.exp())
    }

    /// Conformal factor `(f / rho)^2`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        Ok((-2.0 * self.phi(t)?).exp())
    }

    /// Coordinate with isotropic radius `rho`.
    pub fn t_at(&self, rho: f64) -> Result<f64> {
        let lo = self.metric.domain.lo;
        let g = |t: f64| -> Result<f64> { Ok(self.rho(t)?.ln() - rho.ln()) };
        let mut t = rho.max(lo);
        for _ in 0..100 {
            let v = g(t)?;
            let f = self.metric.warp(0).eval(t);
            let lapse = self.metric.lapse(t);
            let mut next = t - v * f / lapse;
            if next <= lo {
                next = 0.5 * (t + lo);
            }
            if (next - t).abs() <= 1e-14 * (1.0 + t.abs()) {
                return Ok(next);
            }
            t = next;
        }
        Err(MslError::NoRoot(format!("isotropic radius {rho} not reached")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
}

impl FitWindow {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        Self {
            r_min,
            r_max,
            samples: 32,
        }
    }

    /// `[10 m, 10^3 m]`
    pub fn for_mass(m: f64) -> Self {
        Self::new(10.0 * m, 1000.0 * m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndAsymptotics {
    #[serde(with = "dec17")]
    pub mass: f64,
    /// Log-log slope of the conformal factor beyond its mass term; absent
    /// when that remainder is below round-off.
    #[serde(with = "dec17::option")]
    pub decay_exponent: Option<f64>,
    /// Log-log slope of `int_{A(R, 2R)} |z|^2`; absent for flat ends.
    #[serde(with = "dec17::option")]
    pub z_decay_slope: Option<f64>,
    pub window: FitWindow,
    /// Largest relative residual of the conformal-factor fit.
    #[serde(with = "dec17")]
    pub mass_fit_residual: f64,
    /// Largest residuals of the log-log fits.
    #[serde(with = "dec17::option")]
    pub decay_fit_residual: Option<f64>,
    #[serde(with = "dec17::option")]
    pub z_fit_residual: Option<f64>,
}

/// Energy `int |z|^2` of the isotropic annulus `R <= rho <= R2`.
pub fn annulus_z_energy(m: &Metric1D, chart: &IsotropicChart, r: f64, r2: f64) -> Result<f64> {
    let a = chart.t_at(r)?;
    let b = chart.t_at(r2)?;
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    };
    m.integrate_density(
        a,
        b,
        |x| {
            m.local::<3>(x)
                .traceless_ricci()
                .iter()
                .map(|c| c.value() * c.value())
                .sum()
        },
        opts,
    )
}

/// Fits `psi - 1 = 2 m / rho + c / rho^2 + c' / rho^3` in the isotropic chart, the decay
/// rate of the remainder, and the decay of the annular `|z|^2` energy.
pub fn fit_end_asymptotics(m: &Metric1D, window: FitWindow) -> Result<EndAsymptotics> {
    if !(window.r_min > 0.0 && window.r_max >= 10.0 * window.r_min) {
        return Err(MslError::WindowTooNarrow {
            lo: window.r_min,
            hi: window.r_max,
            detail: "the window must span at least one decade".into(),
        });
    }
    if window.samples < 8 {
        return Err(MslError::WindowTooNarrow {
            lo: window.r_min,
            hi: window.r_max,
            detail: "at least eight samples are needed".into(),
        });
    }
    let guess = m.domain.lo.max(0.0) + window.r_max;
    let chart = IsotropicChart::new(m, guess)?;
    let rhos = numeric::logspace(window.r_min, window.r_max, window.samples);
    let mut psi1 = Vec::with_capacity(rhos.len());
    for &r in &rhos {
        psi1.push(chart.psi(chart.t_at(r)?)? - 1.0);
    }
    let cols = vec![
        rhos.iter().map(|r| 1.0 / r).collect::<Vec<_>>(),
        rhos.iter().map(|r| 1.0 / (r * r)).collect::<Vec<_>>(),
        rhos.iter().map(|r| 1.0 / (r * r * r)).collect::<Vec<_>>(),
    ];
    let c = least_squares(&cols, &psi1)?;
    let mass = 0.5 * c[0];
    let scale = psi1.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let fitted: Vec<f64> = rhos
        .iter()
        .map(|r| c[0] / r + c[1] / (r * r) + c[2] / (r * r * r))
        .collect();
    let mass_fit_residual = if scale > 0.0 {
        psi1.iter().zip(&fitted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
    } else {
        0.0
    };
    let h: Vec<f64> = rhos.iter().zip(&psi1).map(|(r, p)| p - c[0] / r).collect();
    let hmax = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-9 * scale.max(1e-300);
    let consistent_sign = h.iter().all(|v| *v > 0.0) || h.iter().all(|v| *v < 0.0);
    let (decay_exponent, decay_fit_residual) = if hmax <= floor || !consistent_sign || scale == 0.0 {
        (None, None)
    } else {
        let habs: Vec<f64> = h.iter().map(|v| v.abs()).collect();
        let fit = loglog_fit(&rhos, &habs)?;
        (Some(fit.slope), Some(fit.max_residual))
    };
    let zr = numeric::logspace(window.r_min, window.r_max, 12);
    let mut energies = Vec::with_capacity(zr.len());
    for &r in &zr {
        energies.push(annulus_z_energy(m, &chart, r, 2.0 * r)?);
    }
    let (z_decay_slope, z_fit_residual) = if energies.iter().all(|e| *e > 0.0) {
        let fit = loglog_fit(&zr, &energies)?;
        (Some(fit.slope), Some(fit.max_residual))
    } else {
        (None, None)
    };
    Ok(EndAsymptotics {
        mass,
        decay_exponent,
        z_decay_slope,
        window,
        mass_fit_residual,
        decay_fit_residual,
        z_fit_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{self, shape_operator, Orientation};
    use approx::assert_relative_eq;

    #[test]
    fn radius_arclength_round_trip() {
        for form in [SchwarzschildForm::AreaRadius, SchwarzschildForm::ConformallyFlat] {
            let s = SchwarzschildSpec::new(1.3, form);
            for r in [3.0, 17.0, 400.0] {
                assert_relative_eq!(s.radius_at_arclength(s.arclength_at_radius(r)), r, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn horizon_is_minimal_with_gauss_curvature() {
        let spec = SchwarzschildSpec::new(1.0, SchwarzschildForm::AreaRadius);
        let g = make_schwarzschild(&spec).unwrap();
        let m = g.single().unwrap();
        assert_relative_eq!(m.level_gauss_curvature(0.0), 0.25, max_relative = 1e-14);
        let a = shape_operator(m, 1e-300, Orientation::Increasing);
        assert!(a.is_ok());
    }

    #[test]
    fn doubled_sheets_are_smooth() {
        let spec = SchwarzschildSpec {
            doubled: true,
            ..SchwarzschildSpec::new(1.0, SchwarzschildForm::AreaRadius)
        };
        match make_schwarzschild(&spec).unwrap() {
            SchwarzschildModel::Doubled(g) => assert_eq!(g.seams[0].target, SeamOrder::C2),
            _ => panic!("expected doubled model"),
        }
    }

    #[test]
    fn cusp_is_hyperbolic() {
        let c = make_cusp(&CuspSpec {
            d1: 1.0,
            d2: 2.0,
            cos_angle: 0.5,
            t0: 3.0,
        })
        .unwrap();
        for s in metric::scalar_curvature(&c, &[3.0, 5.0, 40.0]).unwrap() {
            assert_relative_eq!(s, -6.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn cap_beyond_sphere_rejected() {
        let r = make_sphere_cap(&SphereCapSpec {
            delta: 1.0,
            radius: 4.0,
            complement: false,
        });
        assert!(matches!(r, Err(MslError::CapExceedsSphere { .. })));
    }

    #[test]
    fn c1_cap_matches_closed_form() {
        let m = 1.0;
        for r in [100.0, 1000.0] {
            let sol = solve_cap_matching(r, CapVariant::C1, m).unwrap();
            assert!(sol.residual[0].abs().max(sol.residual[1].abs()) <= 1e-12);
            let (rho, sigma) = conformal_boundary_data(r, m);
            let th = sigma.acos();
            assert_relative_eq!(sol.delta, th.sin() / rho, max_relative = 1e-10);
            assert_relative_eq!(sol.radius, th * rho / th.sin(), max_relative = 1e-10);
            assert_relative_eq!(sol.shape_operator(), sigma / rho, max_relative = 1e-10);
        }
    }

    #[test]
    fn flat_end_has_no_mass() {
        let g = Metric1D::spherical(
            RadialFn::Affine {
                slope: 1.0,
                intercept: 0.0,
            },
            Interval::new(0.0, f64::INFINITY).unwrap(),
        )
        .unwrap();
        let fit = fit_end_asymptotics(&g, FitWindow::new(10.0, 1000.0)).unwrap();
        assert!(fit.mass.abs() < 1e-9);
        assert_eq!(fit.decay_exponent, None);
        assert_eq!(fit.z_decay_slope, None);
    }

    #[test]
    fn narrow_window_rejected() {
        let g = Metric1D::spherical(
            RadialFn::Affine {
                slope: 1.0,
                intercept: 0.0,
            },
            Interval::new(0.0, f64::INFINITY).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            fit_end_asymptotics(&g, FitWindow::new(10.0, 20.0)),
            Err(MslError::WindowTooNarrow { .. })
        ));
    }
}
