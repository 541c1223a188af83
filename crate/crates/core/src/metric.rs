//! Reduced metrics `dt^2 + f1^2 (1 - a^2) dth1^2 + f2^2 dth2^2` (doubly
//! warped torus bundles) and `dt^2 + f^2 dOmega^2` (spherically symmetric),
//! with their curvature, shape operators, volumes and scale radii.
//!
//! All curvature quantities are computed in the orthonormal frame
//! `(E_t, E_1, E_2)`; for the spherical form both tangential directions
//! carry the same warping.

use crate::error::{MslError, Result};
use crate::jet::Jet;
use crate::numeric::{self, brent, integrate, QuadOptions};
use crate::radial::{Interval, RadialFn, WarpFn};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const BAND_REFINEMENT: usize = 4;

/// Grid size from `MSL_GRID_POINTS`, falling back to the default.
pub fn default_grid_points() -> usize {
    std::env::var("MSL_GRID_POINTS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n >= 2)
        .unwrap_or(DEFAULT_GRID_POINTS)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum MetricKind {
    DoublyWarped { cos_angle: f64 },
    SphericallySymmetric,
}

/// Relation between the coordinate and arclength: `ds = lapse(x) dx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Transverse {
    Arclength,
    Lapse { lapse: RadialFn },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Unit normal along increasing coordinate.
    Increasing,
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric1D {
    pub kind: MetricKind,
    pub domain: Interval,
    pub warpings: Vec<WarpFn>,
    pub transverse: Transverse,
}

/// Arclength jets of the warpings at a point.
#[derive(Clone, Copy, Debug)]
pub struct Local<const N: usize> {
    /// Coordinate as a function of arclength offset.
    pub x: Jet<N>,
    pub f: [Jet<N>; 2],
    pub spherical: bool,
}

impl<const N: usize> Local<N> {
    /// Principal curvatures `f_i' / f_i` of the level set.
    pub fn kappa(&self) -> [Jet<N>; 2] {
        [self.f[0].diff() / self.f[0], self.f[1].diff() / self.f[1]]
    }

    /// Sectional curvatures `(K_t1, K_t2, K_12)`.
    pub fn sectional(&self) -> [Jet<N>; 3] {
        let d1 = self.f[0].diff();
        let d2 = self.f[1].diff();
        let k_r1 = -(d1.diff() / self.f[0]);
        let k_r2 = -(d2.diff() / self.f[1]);
        let k_12 = if self.spherical {
            (1.0 - d1 * d1) / (self.f[0] * self.f[0])
        } else {
            -(d1 * d2) / (self.f[0] * self.f[1])
        };
        [k_r1, k_r2, k_12]
    }

    /// Ricci eigenvalues `(radial, tangential 1, tangential 2)`.
    pub fn ricci(&self) -> [Jet<N>; 3] {
        let [k1, k2, k12] = self.sectional();
        [k1 + k2, k1 + k12, k2 + k12]
    }

    /// Scalar curvature from the closed formula in the warpings.
    pub fn scalar(&self) -> Jet<N> {
        let d1 = self.f[0].diff();
        let d2 = self.f[1].diff();
        if self.spherical {
            let f = self.f[0];
            ((d1.diff() / f) * -2.0 + (1.0 - d1 * d1) / (f * f)) * 2.0
        } else {
            (-(d1.diff() / self.f[0]) - d2.diff() / self.f[1] - (d1 * d2) / (self.f[0] * self.f[1])) * 2.0
        }
    }

    /// Traceless Ricci components.
    pub fn traceless_ricci(&self) -> [Jet<N>; 3] {
        let r = self.ricci();
        let third = (r[0] + r[1] + r[2]) / 3.0;
        [r[0] - third, r[1] - third, r[2] - third]
    }

    /// Arclength jet of a function of the coordinate.
    pub fn pull(&self, u: &RadialFn) -> Jet<N> {
        u.jet(self.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigen {
    pub value: f64,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeOperator {
    pub eigenvalues: Vec<Eigen>,
    pub orientation: Orientation,
}

impl ShapeOperator {
    pub fn mean(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.value * e.multiplicity as f64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub grid: Vec<f64>,
    pub scalar: Vec<f64>,
    /// Ricci eigenvalues `(radial, tangential 1, tangential 2)`.
    pub ricci: Vec<[f64; 3]>,
    pub z_norm_sq: Vec<f64>,
    pub shape: Vec<ShapeOperator>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Exact,
    /// Second-order centered differences with the given step (arclength coordinates only).
    CenteredDifference {
        step: f64,
    },
}

/// Where a ball is centered: at a cone/pole endpoint or around a level set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Center {
    LowerEnd,
    UpperEnd,
    Level { x: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteredEstimate {
    pub radius: f64,
    pub center: Center,
    pub threshold: f64,
    /// True when no crossing occurred before the ball reached the domain boundary.
    pub capped: bool,
    pub label: String,
}

fn tail_is_cone(f: f64, fp: f64, scale: f64) -> bool {
    f <= 1e-10 * fp.abs().max(1e-300) * scale.max(1e-300) || f == 0.0
}

impl Metric1D {
    pub fn new(kind: MetricKind, domain: Interval, warpings: Vec<WarpFn>, transverse: Transverse) -> Result<Self> {
        let expected = match kind {
            MetricKind::DoublyWarped { cos_angle } => {
                if !(cos_angle.abs() < 1.0) {
                    return Err(MslError::InvalidInput(format!(
                        "cos_angle {cos_angle} must satisfy |a| < 1"
                    )));
                }
                2
            }
            MetricKind::SphericallySymmetric => 1,
        };
        if warpings.len() != expected {
            return Err(MslError::InvalidInput(format!(
                "expected {expected} warping function(s), got {}",
                warpings.len()
            )));
        }
        for w in &warpings {
            if !w.domain.contains_interval(&domain) {
                return Err(MslError::InvalidInput(format!(
                    "warping declared on [{}, {}] does not cover [{}, {}]",
                    w.domain.lo, w.domain.hi, domain.lo, domain.hi
                )));
            }
        }
        Ok(Self {
            kind,
            domain,
            warpings,
            transverse,
        })
    }

    pub fn spherical(f: RadialFn, domain: Interval) -> Result<Self> {
        Self::new(
            MetricKind::SphericallySymmetric,
            domain,
            vec![WarpFn::new(f, domain)],
            Transverse::Arclength,
        )
    }

    pub fn doubly_warped(f1: RadialFn, f2: RadialFn, cos_angle: f64, domain: Interval) -> Result<Self> {
        Self::new(
            MetricKind::DoublyWarped { cos_angle },
            domain,
            vec![WarpFn::new(f1, domain), WarpFn::new(f2, domain)],
            Transverse::Arclength,
        )
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self.kind, MetricKind::SphericallySymmetric)
    }

    pub fn warp(&self, i: usize) -> &RadialFn {
        &self.warpings[i.min(self.warpings.len() - 1)].func
    }

    pub fn lapse(&self, x: f64) -> f64 {
        match &self.transverse {
            Transverse::Arclength => 1.0,
            Transverse::Lapse { lapse } => lapse.eval(x),
        }
    }

    fn coordinate_jet<const N: usize>(&self, x: f64) -> Jet<N> {
        match &self.transverse {
            Transverse::Arclength => Jet::variable(x),
            Transverse::Lapse { lapse } => {
                let mut xs = Jet::<N>::constant(x);
                for _ in 0..N {
                    xs = lapse.jet(xs).recip().integrate(x);
                }
                xs
            }
        }
    }

    /// Arclength jets at coordinate `x`, without domain checks.
    pub fn local<const N: usize>(&self, x: f64) -> Local<N> {
        let xs = self.coordinate_jet::<N>(x);
        let f1 = self.warpings[0].func.jet(xs);
        let f2 = if self.is_spherical() {
            f1
        } else {
            self.warpings[1].func.jet(xs)
        };
        Local {
            x: xs,
            f: [f1, f2],
            spherical: self.is_spherical(),
        }
    }

    /// Area of the level set at `x`.
    pub fn level_area(&self, x: f64) -> f64 {
        match self.kind {
            MetricKind::SphericallySymmetric => {
                let f = self.warp(0).eval(x);
                4.0 * PI * f * f
            }
            MetricKind::DoublyWarped { cos_angle } => {
                (2.0 * PI).powi(2) * (1.0 - cos_angle * cos_angle).sqrt() * self.warp(0).eval(x) * self.warp(1).eval(x)
            }
        }
    }

    /// Volume per unit coordinate length.
    pub fn volume_density(&self, x: f64) -> f64 {
        self.level_area(x) * self.lapse(x)
    }

    /// Intrinsic Gauss curvature of the level set.
    pub fn level_gauss_curvature(&self, x: f64) -> f64 {
        match self.kind {
            MetricKind::SphericallySymmetric => {
                let f = self.warp(0).eval(x);
                1.0 / (f * f)
            }
            MetricKind::DoublyWarped { .. } => 0.0,
        }
    }

    fn scale(&self) -> f64 {
        if self.domain.is_finite() {
            self.domain.length()
        } else {
            1.0
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(MslError::GridOutOfDomain {
                point: x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(())
    }

    /// Whether `x` is an endpoint at which some warping collapses.
    pub fn is_cone_endpoint(&self, x: f64) -> bool {
        let at_end = (x - self.domain.lo).abs() <= 1e-12 * (1.0 + x.abs())
            || (x - self.domain.hi).abs() <= 1e-12 * (1.0 + x.abs());
        if !at_end {
            return false;
        }
        self.warpings.iter().any(|w| {
            let d = w.func.derivs::<2>(x);
            tail_is_cone(d[0], d[1], self.scale())
        })
    }

    fn check_positive(&self, x: f64) -> Result<()> {
        for w in &self.warpings {
            let d = w.func.derivs::<2>(x);
            if !(d[0] > 0.0) || tail_is_cone(d[0], d[1], self.scale()) {
                return Err(MslError::WarpingNonpositiveOnGrid { point: x, value: d[0] });
            }
        }
        Ok(())
    }

    /// Evaluates pointwise quantities at `x`, replacing cone endpoints with
    /// one-sided limits by Richardson extrapolation.
    pub fn evaluate_with_limits<F>(&self, x: f64, q: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        self.check_point(x)?;
        if self.is_cone_endpoint(x) {
            let inward = if (x - self.domain.lo).abs() < (x - self.domain.hi).abs() {
                1.0
            } else {
                -1.0
            };
            let h0 = 0.05 * self.scale().min(1.0);
            let steps: Vec<f64> = (0..6).map(|k| h0 / 2f64.powi(k)).collect();
            let values: Vec<Vec<f64>> = steps.iter().map(|h| q(x + inward * h)).collect();
            return Ok(neville_at_zero(&steps, &values));
        }
        self.check_positive(x)?;
        Ok(q(x))
    }

    pub fn uniform_grid(&self, n: usize) -> Result<Vec<f64>> {
        if !self.domain.is_finite() {
            return Err(MslError::InvalidInput("uniform grid needs a finite domain".into()));
        }
        Ok(numeric::linspace(self.domain.lo, self.domain.hi, n.max(2)))
    }

    pub fn restricted(&self, domain: Interval) -> Result<Self> {
        if !self.domain.contains_interval(&domain) {
            return Err(MslError::GridOutOfDomain {
                point: if self.domain.contains(domain.lo) {
                    domain.hi
                } else {
                    domain.lo
                },
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(Self { domain, ..self.clone() })
    }

    /// The same metric in the coordinate `x + shift`.
    pub fn translated(&self, shift: f64) -> Self {
        let mv = |i: Interval| Interval {
            lo: i.lo + shift,
            hi: i.hi + shift,
        };
        Self {
            kind: self.kind,
            domain: mv(self.domain),
            warpings: self
                .warpings
                .iter()
                .map(|w| WarpFn::new(w.func.clone().translate(shift), mv(w.domain)))
                .collect(),
            transverse: match &self.transverse {
                Transverse::Arclength => Transverse::Arclength,
                Transverse::Lapse { lapse } => Transverse::Lapse {
                    lapse: lapse.clone().translate(shift),
                },
            },
        }
    }

    /// The metric `lambda^2 g` in the coordinate `lambda x`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(MslError::InvalidInput(format!(
                "scale factor {lambda} must be positive"
            )));
        }
        let sc = |i: Interval| Interval {
            lo: i.lo * lambda,
            hi: i.hi * lambda,
        };
        Ok(Self {
            kind: self.kind,
            domain: sc(self.domain),
            warpings: self
                .warpings
                .iter()
                .map(|w| WarpFn::new(w.func.clone().rescale(lambda, lambda), sc(w.domain)))
                .collect(),
            transverse: match &self.transverse {
                Transverse::Arclength => Transverse::Arclength,
                Transverse::Lapse { lapse } => Transverse::Lapse {
                    lapse: lapse.clone().rescale(lambda, 1.0),
                },
            },
        })
    }

    /// The conformal metric `u^2 g` for a positive radial function `u`.
    pub fn conformal(&self, u: &RadialFn) -> Self {
        Self {
            kind: self.kind,
            domain: self.domain,
            warpings: self
                .warpings
                .iter()
                .map(|w| WarpFn::new(w.func.clone().times(u.clone()), w.domain))
                .collect(),
            transverse: Transverse::Lapse {
                lapse: match &self.transverse {
                    Transverse::Arclength => u.clone(),
                    Transverse::Lapse { lapse } => lapse.clone().times(u.clone()),
                },
            },
        }
    }

    /// Arclength between coordinates `a` and `b` (signed).
    pub fn arclength(&self, a: f64, b: f64) -> Result<f64> {
        match &self.transverse {
            Transverse::Arclength => Ok(b - a),
            Transverse::Lapse { lapse } => Ok(integrate(|x| lapse.eval(x), a, b, QuadOptions::default())?.value),
        }
    }

    /// Coordinate reached from `x0` after signed arclength `s`.
    pub fn advance(&self, x0: f64, s: f64) -> Result<f64> {
        match &self.transverse {
            Transverse::Arclength => Ok(x0 + s),
            Transverse::Lapse { .. } => {
                if s == 0.0 {
                    return Ok(x0);
                }
                let target = if s > 0.0 { self.domain.hi } else { self.domain.lo };
                let total = self.arclength(x0, target)?;
                if s.abs() >= total.abs() {
                    return Ok(target);
                }
                brent(
                    |x| self.arclength(x0, x).unwrap_or(f64::NAN) - s,
                    x0,
                    target,
                    1e-14 * (1.0 + x0.abs()),
                )
            }
        }
    }

    pub fn volume_between(&self, a: f64, b: f64) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(integrate(|x| self.volume_density(x), a, b, QuadOptions::default())?.value)
    }

    /// Integrates `q(x) dvol` over `[a, b]`.
    pub fn integrate_density<F: Fn(f64) -> f64>(&self, a: f64, b: f64, q: F, opts: QuadOptions) -> Result<f64> {
        Ok(integrate(|x| q(x) * self.volume_density(x), a, b, opts)?.value)
    }
}

fn neville_at_zero(h: &[f64], values: &[Vec<f64>]) -> Vec<f64> {
    let m = values[0].len();
    (0..m)
        .map(|j| {
            let mut p: Vec<f64> = values.iter().map(|v| v[j]).collect();
            let n = p.len();
            for k in 1..n {
                for i in 0..n - k {
                    p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i]);
                }
            }
            p[0]
        })
        .collect()
}

fn fd_local(m: &Metric1D, x: f64, h: f64) -> Local<3> {
    let d = |f: &RadialFn| {
        let fp = f.eval(x + h);
        let f0 = f.eval(x);
        let fm = f.eval(x - h);
        Jet::<3>::from_derivatives([f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)])
    };
    let f1 = d(m.warp(0));
    let f2 = if m.is_spherical() { f1 } else { d(m.warp(1)) };
    Local {
        x: Jet::variable(x),
        f: [f1, f2],
        spherical: m.is_spherical(),
    }
}

/// Scalar curvature on the grid.
pub fn scalar_curvature(m: &Metric1D, grid: &[f64]) -> Result<Vec<f64>> {
    scalar_curvature_with(m, grid, DerivativeMode::Exact)
}

pub fn scalar_curvature_with(m: &Metric1D, grid: &[f64], mode: DerivativeMode) -> Result<Vec<f64>> {
    if let DerivativeMode::CenteredDifference { step } = mode {
        if !matches!(m.transverse, Transverse::Arclength) {
            return Err(MslError::InvalidInput(
                "finite differences need an arclength coordinate".into(),
            ));
        }
        if !(step > 0.0) {
            return Err(MslError::InvalidInput("difference step must be positive".into()));
        }
    }
    grid.iter()
        .map(|&x| {
            let v = m.evaluate_with_limits(x, |y| {
                let loc = match mode {
                    DerivativeMode::Exact => m.local::<3>(y),
                    DerivativeMode::CenteredDifference { step } => fd_local(m, y, step),
                };
                vec![loc.scalar().value()]
            })?;
            Ok(v[0])
        })
        .collect()
}

/// Principal curvatures of the level set at `x`.
pub fn shape_operator(m: &Metric1D, x: f64, orientation: Orientation) -> Result<ShapeOperator> {
    m.check_point(x)?;
    m.check_positive(x)?;
    let k = m.local::<2>(x).kappa();
    let sgn = orientation.sign();
    let eigenvalues = if m.is_spherical() {
        vec![Eigen {
            value: sgn * k[0].value(),
            multiplicity: 2,
        }]
    } else {
        let (a, b) = (sgn * k[0].value(), sgn * k[1].value());
        if (a - b).abs() <= 1e-14 * a.abs().max(b.abs()) {
            vec![Eigen {
                value: a,
                multiplicity: 2,
            }]
        } else {
            vec![
                Eigen {
                    value: a,
                    multiplicity: 1,
                },
                Eigen {
                    value: b,
                    multiplicity: 1,
                },
            ]
        }
    };
    Ok(ShapeOperator {
        eigenvalues,
        orientation,
    })
}

/// Scalar curvature, Ricci eigenvalues, `|z|^2` and level-set shape
/// operators on the grid.
pub fn ricci_profile(m: &Metric1D, grid: &[f64]) -> Result<CurvatureProfile> {
    let mut out = CurvatureProfile {
        grid: grid.to_vec(),
        scalar: Vec::with_capacity(grid.len()),
        ricci: Vec::with_capacity(grid.len()),
        z_norm_sq: Vec::with_capacity(grid.len()),
        shape: Vec::with_capacity(grid.len()),
    };
    for &x in grid {
        let v = m.evaluate_with_limits(x, |y| {
            let loc = m.local::<3>(y);
            let r = loc.ricci();
            let z = loc.traceless_ricci();
            let k = loc.kappa();
            vec![
                loc.scalar().value(),
                r[0].value(),
                r[1].value(),
                r[2].value(),
                z.iter().map(|c| c.value() * c.value()).sum(),
                k[0].value(),
                k[1].value(),
            ]
        })?;
        out.scalar.push(v[0]);
        out.ricci.push([v[1], v[2], v[3]]);
        out.z_norm_sq.push(v[4]);
        let cone = m.is_cone_endpoint(x);
        out.shape.push(if cone {
            ShapeOperator {
                eigenvalues: vec![],
                orientation: Orientation::Increasing,
            }
        } else if m.is_spherical() {
            ShapeOperator {
                eigenvalues: vec![Eigen {
                    value: v[5],
                    multiplicity: 2,
                }],
                orientation: Orientation::Increasing,
            }
        } else {
            ShapeOperator {
                eigenvalues: vec![
                    Eigen {
                        value: v[5],
                        multiplicity: 1,
                    },
                    Eigen {
                        value: v[6],
                        multiplicity: 1,
                    },
                ],
                orientation: Orientation::Increasing,
            }
        });
    }
    Ok(out)
}

/// Total volume, or the volume of a sub-interval.
pub fn volume(m: &Metric1D, region: Option<Interval>) -> Result<f64> {
    let r = region.unwrap_or(m.domain);
    m.volume_between(r.lo, r.hi)
}

/// Squared norm of the Ricci tensor at `x`.
pub fn ricci_norm_sq(m: &Metric1D, x: f64) -> f64 {
    m.local::<3>(x).ricci().iter().map(|c| c.value() * c.value()).sum()
}

impl Metric1D {
    fn ball(&self, center: Center, s: f64) -> Result<(f64, f64)> {
        match center {
            Center::LowerEnd => Ok((self.domain.lo, self.advance(self.domain.lo, s)?)),
            Center::UpperEnd => Ok((self.advance(self.domain.hi, -s)?, self.domain.hi)),
            Center::Level { x } => Ok((self.advance(x, -s)?, self.advance(x, s)?)),
        }
    }

    fn ball_limit(&self, center: Center) -> Result<f64> {
        match center {
            Center::LowerEnd => {
                if !self.domain.lo.is_finite() {
                    return Err(MslError::NoCenter("lower end is at infinity".into()));
                }
                self.arclength(self.domain.lo, self.domain.hi)
            }
            Center::UpperEnd => {
                if !self.domain.hi.is_finite() {
                    return Err(MslError::NoCenter("upper end is at infinity".into()));
                }
                self.arclength(self.domain.lo, self.domain.hi)
            }
            Center::Level { x } => {
                if !self.domain.contains(x) {
                    return Err(MslError::NoCenter(format!("level {x} lies outside the domain")));
                }
                Ok(self
                    .arclength(self.domain.lo, x)?
                    .min(self.arclength(x, self.domain.hi)?))
            }
        }
    }

    fn characteristic_length(&self, center: Center) -> f64 {
        let x = match center {
            Center::LowerEnd => self.domain.lo,
            Center::UpperEnd => self.domain.hi,
            Center::Level { x } => x,
        };
        let f = self.warp(0).eval(x);
        if f.is_finite() && f > 0.0 {
            f
        } else {
            1.0
        }
    }
}

/// Largest `s` such that the predicate holds for every scanned radius up
/// to `s`; scans geometrically then bisects the first failure.
fn first_crossing<P: FnMut(f64) -> Result<bool>>(limit: f64, scale: f64, mut pred: P) -> Result<(f64, bool)> {
    let top = if limit.is_finite() { limit } else { scale * 1e9 };
    let mut s = if limit.is_finite() { limit * 1e-10 } else { scale * 1e-6 };
    let factor = 2f64.powf(0.25);
    let mut lo = 0.0;
    let mut hi = None;
    if !pred(s)? {
        hi = Some(s);
    } else {
        loop {
            let next = (s * factor).min(top);
            if !pred(next)? {
                lo = s;
                hi = Some(next);
                break;
            }
            if next >= top {
                break;
            }
            s = next;
        }
    }
    match hi {
        None => Ok((if limit.is_finite() { limit } else { f64::INFINITY }, true)),
        Some(mut hi) => {
            for _ in 0..60 {
                if hi - lo <= 1e-13 * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if pred(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((lo, false))
        }
    }
}

/// Ricci-based curvature radius of balls at `center`: the largest `s` with
/// `s^4 * int_B |Ric|^2 / vol(B) <= c0` for all smaller radii.
pub fn curvature_radius(m: &Metric1D, center: Center, c0: f64) -> Result<CenteredEstimate> {
    let limit = m.ball_limit(center)?;
    let scale = m.characteristic_length(center);
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        ..QuadOptions::default()
    };
    let (radius, capped) = first_crossing(limit, scale, |s| {
        let (a, b) = m.ball(center, s)?;
        let vol = m.volume_between(a, b)?;
        let ric = m.integrate_density(a, b, |x| ricci_norm_sq(m, x), opts)?;
        Ok(s.powi(4) * ric / vol <= c0)
    })?;
    Ok(CenteredEstimate {
        radius,
        center,
        threshold: c0,
        capped,
        label: "centered-ball estimate".into(),
    })
}

/// Volume radius: the largest `s` with `vol(B(s)) / s^3 >= mu` for all smaller radii.
pub fn volume_radius(m: &Metric1D, center: Center, mu: f64) -> Result<CenteredEstimate> {
    let limit = m.ball_limit(center)?;
    let scale = m.characteristic_length(center);
    let (radius, capped) = first_crossing(limit, scale, |s| {
        let (a, b) = m.ball(center, s)?;
        Ok(m.volume_between(a, b)? / s.powi(3) >= mu)
    })?;
    Ok(CenteredEstimate {
        radius,
        center,
        threshold: mu,
        capped,
        label: "centered-ball estimate".into(),
    })
}
