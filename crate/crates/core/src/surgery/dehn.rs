//! Dehn filling of a hyperbolic cusp by a solid torus with explicit trial
//! warpings, and the bend that closes the core cone singularity.

use super::glued::{GluedMetric, SeamOrder, WarpJump};
use super::smoothing::{smooth_seams, BandPlacement, SmoothingOptions, SmoothingReport};
use crate::error::{MslError, Result};
use crate::metric::{self, Metric1D};
use crate::models::{cusp_volume, CuspSpec};
use crate::numeric::{integrate, linspace, PiecewisePolynomial, QuadOptions};
use crate::radial::{Interval, RadialFn};
use crate::serde_ext::dec17;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DehnFillSpec {
    pub cusp: CuspSpec,
    /// Length of cusp kept beyond the glueing torus.
    #[serde(default = "default_slice")]
    pub slice: f64,
}

fn default_slice() -> f64 {
    1.0
}

impl DehnFillSpec {
    pub fn new(cusp: CuspSpec) -> Self {
        Self { cusp, slice: 1.0 }
    }

    pub fn c1(&self) -> f64 {
        self.cusp.d1 * (-self.cusp.t0).exp()
    }

    pub fn c2(&self) -> f64 {
        self.cusp.d2 * (-self.cusp.t0).exp()
    }

    pub fn cone_angle(&self) -> f64 {
        PI * self.c1() * (1.0 - self.cusp.cos_angle.powi(2)).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DehnFill {
    pub spec: DehnFillSpec,
    /// Solid torus on `[0, pi/2]`, then the retained cusp slice.
    pub metric: GluedMetric,
    #[serde(with = "dec17")]
    pub c1: f64,
    #[serde(with = "dec17")]
    pub c2: f64,
    #[serde(with = "dec17")]
    pub cone_angle: f64,
    /// Jumps of the warpings at `r = pi/2` against the cusp data.
    pub seam_jumps: Vec<WarpJump>,
    #[serde(with = "dec17")]
    pub torus_volume: f64,
    /// Volume of the cusp beyond `t0`, which the torus replaces.
    #[serde(with = "dec17")]
    pub cusp_volume: f64,
}

impl DehnFill {
    pub fn volume_ratio(&self) -> f64 {
        self.torus_volume / self.cusp_volume
    }

    pub fn torus(&self) -> &Metric1D {
        &self.metric.pieces[0]
    }
}

/// `int_0^(pi/2) e^(-cos r) tan(r/2) dr` with its error estimate.
pub fn trial_volume_integral() -> Result<(f64, f64)> {
    let q = integrate(
        |r: f64| (-r.cos()).exp() * (0.5 * r).tan(),
        0.0,
        FRAC_PI_2,
        QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            max_subdivisions: 4000,
        },
    )?;
    Ok((q.value, q.error))
}

/// The trial scalar curvature `-2(1 + cos r + sin^2 r + 1/(2 cos^2(r/2)))`.
pub fn trial_scalar_closed_form(r: f64) -> f64 {
    -2.0 * (1.0 + r.cos() + r.sin().powi(2) + 0.5 / (0.5 * r).cos().powi(2))
}

/// Glues the trial solid torus `f1 = c1 tan(r/2)`, `f2 = c2 e^(-cos r)` onto
/// the cusp at `t0`. The kept part of the cusp continues past `r = pi/2`
/// with `f_i = c_i e^(r - pi/2)`.
pub fn dehn_fill(spec: &DehnFillSpec) -> Result<DehnFill> {
    let a = spec.cusp.cos_angle;
    if !(spec.cusp.d1 > 0.0 && spec.cusp.d2 > 0.0 && a.abs() < 1.0) {
        return Err(MslError::InvalidInput(
            "cusp torus needs positive sides and |a| < 1".into(),
        ));
    }
    if !(spec.slice > 0.0) {
        return Err(MslError::InvalidInput(
            "retained cusp slice must have positive length".into(),
        ));
    }
    let angle = spec.cone_angle();
    if angle >= 2.0 * PI {
        return Err(MslError::ConeAngleExceedsSmooth { angle });
    }
    let (c1, c2) = (spec.c1(), spec.c2());
    let torus = Metric1D::doubly_warped(
        RadialFn::HalfTangent { scale: c1 },
        RadialFn::ExpNegCos { scale: c2 },
        a,
        Interval::new(0.0, FRAC_PI_2)?,
    )?;
    let slice = Metric1D::doubly_warped(
        RadialFn::Exponential {
            scale: c1 * (-FRAC_PI_2).exp(),
            rate: 1.0,
        },
        RadialFn::Exponential {
            scale: c2 * (-FRAC_PI_2).exp(),
            rate: 1.0,
        },
        a,
        Interval::new(FRAC_PI_2, FRAC_PI_2 + spec.slice)?,
    )?;
    let metric = GluedMetric::new(vec![torus, slice], vec![SeamOrder::C1])?;
    let seam_jumps = metric.seams[0].jumps.clone();
    let torus_volume = metric::volume(&metric.pieces[0], None)?;
    Ok(DehnFill {
        spec: *spec,
        metric,
        c1,
        c2,
        cone_angle: angle,
        seam_jumps,
        torus_volume,
        cusp_volume: cusp_volume(&spec.cusp),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BentCore {
    /// Bent core, the rest of the torus and the cusp slice; C1 at `r0`.
    pub metric: GluedMetric,
    #[serde(with = "dec17")]
    pub r0: f64,
    /// Width of the plateau of the cubic-power part of the bent slope.
    #[serde(with = "dec17")]
    pub plateau: f64,
    #[serde(with = "dec17")]
    pub beta: f64,
    /// Largest `f1''` on the bend grid; must be `<= 0`.
    #[serde(with = "dec17")]
    pub max_second_derivative: f64,
    #[serde(with = "dec17")]
    pub min_bend_scalar: f64,
    /// Largest relative change of `f2` on the bend.
    #[serde(with = "dec17")]
    pub f2_perturbation: f64,
    /// Volume after bending minus the trial volume of `[0, r0]`.
    #[serde(with = "dec17")]
    pub volume_change: f64,
}

/// Replaces the trial warpings on `[r0/2, r0]` so the core closes up
/// smoothly at `r0/2`: `f1` becomes concave with slope `(1 - a^2)^(-1/2)` at
/// the core, and `f2` gets a C2 bump flattening it there.
pub fn bend_core(fill: &DehnFill, r0: f64) -> Result<BentCore> {
    let torus = fill.torus();
    let a = fill.spec.cusp.cos_angle;
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(MslError::InvalidInput(format!("bend radius {r0} must lie in (0, 1)")));
    }
    let k = (1.0 - a * a).powf(-0.5);
    let [f_r, s_r, _] = torus.warp(0).derivs::<3>(r0);
    if s_r >= k {
        return Err(MslError::ConeAngleExceedsSmooth { angle: fill.cone_angle });
    }
    let h = 0.5 * r0;
    let lo = h;
    let gap = k - s_r;
    // f1 = s_r x + gap * ((1 - beta) P_L(x) + beta Q_h(x)), with P_L and Q_h
    // the primitives of (1 - (x/L)^2)^3_+ and 1 - (x/h)^2.
    let integral = (f_r - s_r * h) / gap;
    let beta_max = 1.5 * integral / h;
    if !(integral > 0.0 && beta_max < 1.0) {
        return Err(MslError::ConcaveInterpolantInfeasible(format!(
            "slope excess integral {integral:e} incompatible with half-width {h:e}"
        )));
    }
    let beta = 0.5 * beta_max;
    let plateau = (integral - 2.0 / 3.0 * beta * h) / ((1.0 - beta) * 16.0 / 35.0);
    if !(plateau > 0.0 && plateau < h) {
        return Err(MslError::ConcaveInterpolantInfeasible(format!(
            "plateau {plateau:e} outside (0, {h:e})"
        )));
    }
    let l = plateau;
    let p = gap * (1.0 - beta);
    let q = gap * beta;
    let inner = vec![
        0.0,
        k,
        0.0,
        -(p / (l * l) + q / (3.0 * h * h)),
        0.0,
        0.6 * p / l.powi(4),
        0.0,
        -p / (7.0 * l.powi(6)),
    ];
    let outer = vec![
        s_r * l + p * 16.0 / 35.0 * l + q * (l - l.powi(3) / (3.0 * h * h)),
        s_r + q * (1.0 - l * l / (h * h)),
        -q * l / (h * h),
        -q / (3.0 * h * h),
    ];
    let f1 = RadialFn::Spline {
        poly: PiecewisePolynomial::new(vec![lo, lo + l, r0], vec![inner, outer])?,
    };
    let slope2 = torus.warp(1).derivs::<2>(lo)[1];
    let bump = RadialFn::Spline {
        poly: PiecewisePolynomial::new(
            vec![lo, r0],
            vec![vec![
                0.0,
                -slope2,
                3.0 * slope2 / h,
                -3.0 * slope2 / (h * h),
                slope2 / h.powi(3),
            ]],
        )?,
    };
    let f2 = torus.warp(1).clone().plus(bump.clone());
    let dom = Interval::new(lo, r0)?;
    let bent = Metric1D::doubly_warped(f1.clone(), f2, a, dom)?;

    let grid = linspace(lo, r0, metric::default_grid_points() * metric::BAND_REFINEMENT);
    let max_second_derivative = grid
        .iter()
        .map(|&x| f1.derivs::<3>(x)[2])
        .fold(f64::NEG_INFINITY, f64::max);
    if max_second_derivative > 1e-12 * k / h {
        return Err(MslError::ConcaveInterpolantInfeasible(format!(
            "bent f1 has f1'' = {max_second_derivative:e} > 0"
        )));
    }
    let s = metric::scalar_curvature(&bent, &grid)?;
    let min_bend_scalar = s.iter().copied().fold(f64::INFINITY, f64::min);
    let f2_perturbation = grid
        .iter()
        .map(|&x| (bump.eval(x) / torus.warp(1).eval(x)).abs())
        .fold(0.0, f64::max);
    if f2_perturbation > 1e-2 {
        return Err(MslError::ConcaveInterpolantInfeasible(format!(
            "f2 perturbation {f2_perturbation:e} exceeds 1e-2 relative"
        )));
    }

    let rest = torus.restricted(Interval::new(r0, torus.domain.hi)?)?;
    let mut pieces = vec![bent, rest];
    pieces.extend(fill.metric.pieces[1..].iter().cloned());
    let mut targets = vec![SeamOrder::C1];
    targets.extend(fill.metric.seams.iter().map(|s| s.target));
    let metric = GluedMetric::new(pieces, targets)?;
    let volume_change = metric::volume(&metric.pieces[0], None)? - torus.volume_between(0.0, r0)?;
    Ok(BentCore {
        metric,
        r0,
        plateau,
        beta,
        max_second_derivative,
        min_bend_scalar,
        f2_perturbation,
        volume_change,
    })
}

/// Default bend radius `c1 / 10`.
pub fn default_bend_radius(fill: &DehnFill) -> f64 {
    fill.c1 / 10.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedFill {
    pub metric: GluedMetric,
    pub smoothing: SmoothingReport,
    #[serde(with = "dec17")]
    pub min_scalar: f64,
    #[serde(with = "dec17")]
    pub min_location: f64,
    pub grid_points: usize,
    /// Minimum of `s` over the bend left of the smoothing band.
    #[serde(with = "dec17")]
    pub bend_min_scalar: f64,
}

/// Smooths the C1 seam left by the bend on `[3 r0 / 4, r0]`, inside the
/// concave part where the large negative `f1''` can be blended away without
/// overshoot, with the floor `s >= -6`; then scans the result.
pub fn smooth_fill(bent: &BentCore) -> Result<SmoothedFill> {
    let mut opts = SmoothingOptions::new(0.25 * bent.r0);
    opts.placement = BandPlacement::Left;
    opts.floor = Some(-6.0);
    let (metric, smoothing) = smooth_seams(&bent.metric, &opts)?;
    let grid = metric.grid(metric::default_grid_points())?;
    let s = metric.scalar_curvature(&grid)?;
    let (i, min_scalar) = s
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, v)| if *v < acc.1 { (k, *v) } else { acc });
    let band_lo = smoothing.bands.first().map_or(bent.r0, |b| b.band.lo);
    let bend_min_scalar = grid
        .iter()
        .zip(&s)
        .filter(|(x, _)| **x < band_lo)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    Ok(SmoothedFill {
        metric,
        smoothing,
        min_scalar,
        min_location: grid[i],
        grid_points: grid.len(),
        bend_min_scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(t0: f64, a: f64) -> DehnFillSpec {
        DehnFillSpec::new(CuspSpec {
            d1: 1.0,
            d2: 1.0,
            cos_angle: a,
            t0,
        })
    }

    #[test]
    fn trial_pair_matches_cusp_to_first_order() {
        let f = dehn_fill(&spec(5.0, 0.0)).unwrap();
        for j in &f.seam_jumps {
            assert!(j.value.abs() < 1e-12 * f.c1 && j.first.abs() < 1e-12 * f.c1);
        }
        let [v, d] = f.torus().warp(1).derivs::<2>(0.0);
        assert_relative_eq!(v, f.c2 / std::f64::consts::E, max_relative = 1e-15);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn trial_scalar_matches_closed_form() {
        let f = dehn_fill(&spec(3.0, 0.5)).unwrap();
        let grid = linspace(0.01, FRAC_PI_2, 200);
        let s = metric::scalar_curvature(f.torus(), &grid).unwrap();
        for (x, v) in grid.iter().zip(s) {
            assert!((v - trial_scalar_closed_form(*x)).abs() < 1e-9);
        }
        assert_relative_eq!(trial_scalar_closed_form(0.0), -5.0);
        assert_relative_eq!(trial_scalar_closed_form(FRAC_PI_2), -6.0, max_relative = 1e-15);
    }

    #[test]
    fn volume_ratio_is_t0_free() {
        let (i, _) = trial_volume_integral().unwrap();
        for t0 in [3.0, 5.0, 8.0] {
            let f = dehn_fill(&spec(t0, 0.0)).unwrap();
            assert_relative_eq!(f.volume_ratio(), 2.0 * i, max_relative = 1e-10);
        }
    }

    #[test]
    fn large_cone_angle_rejected() {
        assert!(matches!(
            dehn_fill(&spec(-1.0, 0.0)),
            Err(MslError::ConeAngleExceedsSmooth { .. })
        ));
    }

    #[test]
    fn bend_is_concave_and_positive() {
        for a in [0.0, 0.5] {
            let f = dehn_fill(&spec(5.0, a)).unwrap();
            let b = bend_core(&f, default_bend_radius(&f)).unwrap();
            assert!(b.max_second_derivative <= 0.0);
            assert!(b.min_bend_scalar > 0.0, "{}", b.min_bend_scalar);
            assert!(b.volume_change.abs() < 1e-3 * f.torus_volume);
            let k = (1.0 - a * a).powf(-0.5);
            let d = b.metric.pieces[0].warp(0).derivs::<2>(b.r0 / 2.0);
            assert!(d[0].abs() < 1e-18);
            assert_relative_eq!(d[1], k, max_relative = 1e-14);
            assert!(b.metric.pieces[0].warp(1).derivs::<2>(b.r0 / 2.0)[1].abs() < 1e-15);
        }
    }

    #[test]
    fn smoothed_fill_respects_floor() {
        for a in [0.0, 0.5] {
            let f = dehn_fill(&spec(5.0, a)).unwrap();
            let b = bend_core(&f, default_bend_radius(&f)).unwrap();
            let sm = smooth_fill(&b).unwrap();
            assert!(sm.min_scalar >= -6.0 - 1e-12);
            assert!(sm.bend_min_scalar > 0.0);
        }
    }
}
