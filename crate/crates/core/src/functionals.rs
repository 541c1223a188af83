//! Curvature functionals and the linearized operators around static and
//! critical metrics.

use crate::error::{MslError, Result};
use crate::jet::Jet;
use crate::metric::{Local, Metric1D};
use crate::numeric::{integrate, QuadOptions};
use crate::radial::RadialFn;
use crate::serde_ext::dec17;
use crate::surgery::glued::{GluedMetric, Reduced};
use serde::{Deserialize, Serialize};

/// Integrated curvature quantities of a reduced metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    #[serde(with = "dec17")]
    pub epsilon: f64,
    #[serde(with = "dec17")]
    pub volume: f64,
    /// `int s^2`
    #[serde(with = "dec17")]
    pub scalar_sq: f64,
    /// `int (s^-)^2`, with `s^- = min(s, 0)`
    #[serde(with = "dec17")]
    pub scalar_minus_sq: f64,
    /// `(v^(1/3) int s^2)^(1/2)`
    #[serde(with = "dec17")]
    pub s2: f64,
    /// `(v^(1/3) int (s^-)^2)^(1/2)`
    #[serde(with = "dec17")]
    pub s2_minus: f64,
    /// `int |z|^2`
    #[serde(with = "dec17")]
    pub z2: f64,
    /// `eps v^(1/3) Z^2 + S^2_-`
    #[serde(with = "dec17")]
    pub i_eps: f64,
    /// `(int (s^-)^2)^(1/2)`, the normalization of `s^-`; absent when it vanishes.
    #[serde(with = "dec17::option")]
    pub sigma: Option<f64>,
    #[serde(with = "dec17")]
    pub quadrature_error: f64,
}

fn curvature_opts(scale: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-26 * scale.max(1.0),
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    }
}

fn piece_integral<F: Fn(&Local<3>) -> f64>(p: &Metric1D, q: F, opts: QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(
        |x| {
            let loc = p.local::<3>(x);
            q(&loc) * p.volume_density(x)
        },
        p.domain.lo,
        p.domain.hi,
        opts,
    )?;
    Ok((r.value, r.error))
}

/// Evaluates volume, the scalar-curvature functionals, `Z^2` and `I_eps^-`.
pub fn evaluate_functionals<R: Reduced + ?Sized>(m: &R, epsilon: f64) -> Result<FunctionalReport> {
    if !(epsilon > 0.0) {
        return Err(MslError::InvalidInput("epsilon must be positive".into()));
    }
    let mut volume = 0.0;
    let mut err = 0.0;
    for p in m.pieces() {
        let q = integrate(
            |x| p.volume_density(x),
            p.domain.lo,
            p.domain.hi,
            QuadOptions::default(),
        )?;
        volume += q.value;
        err += q.error;
    }
    let opts = curvature_opts(volume);
    let (mut ssq, mut smsq, mut z2) = (0.0, 0.0, 0.0);
    for p in m.pieces() {
        let (v, e) = piece_integral(p, |l| l.scalar().value().powi(2), opts)?;
        ssq += v;
        err += e;
        let (v, e) = piece_integral(p, |l| l.scalar().value().min(0.0).powi(2), opts)?;
        smsq += v;
        err += e;
        let (v, e) = piece_integral(
            p,
            |l| l.traceless_ricci().iter().map(|c| c.value() * c.value()).sum(),
            opts,
        )?;
        z2 += v;
        err += e;
    }
    let v13 = volume.cbrt();
    let s2 = (v13 * ssq).sqrt();
    let s2_minus = (v13 * smsq).sqrt();
    Ok(FunctionalReport {
        epsilon,
        volume,
        scalar_sq: ssq,
        scalar_minus_sq: smsq,
        s2,
        s2_minus,
        z2,
        i_eps: epsilon * v13 * z2 + s2_minus,
        sigma: if smsq > 0.0 { Some(smsq.sqrt()) } else { None },
        quadrature_error: err,
    })
}

/// Metrics that can be replaced by `lambda^2 g`.
pub trait Rescale: Sized {
    fn rescaled(&self, lambda: f64) -> Result<Self>;
}

impl Rescale for Metric1D {
    fn rescaled(&self, lambda: f64) -> Result<Self> {
        Metric1D::rescaled(self, lambda)
    }
}

impl Rescale for GluedMetric {
    fn rescaled(&self, lambda: f64) -> Result<Self> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.rescaled(lambda))
            .collect::<Result<Vec<_>>>()?;
        GluedMetric::with_bands(
            pieces,
            self.seams.iter().map(|s| s.target).collect(),
            self.bands.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleInvariance {
    #[serde(with = "dec17")]
    pub lambda: f64,
    pub original: FunctionalReport,
    pub rescaled: FunctionalReport,
    /// Relative deviations of `S^2`, `S^2_-`, `I_eps^-` from invariance and
    /// of `Z^2` and the volume from their scaling laws.
    #[serde(with = "dec17")]
    pub s2_deviation: f64,
    #[serde(with = "dec17")]
    pub s2_minus_deviation: f64,
    #[serde(with = "dec17")]
    pub i_eps_deviation: f64,
    #[serde(with = "dec17")]
    pub z2_deviation: f64,
    #[serde(with = "dec17")]
    pub volume_deviation: f64,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

/// Compares functionals of `g` and `lambda^2 g`: `S^2`, `S^2_-` and `I_eps^-`
/// are invariant, `Z^2` scales by `1/lambda`, volume by `lambda^3`.
pub fn scale_invariance_check<R: Reduced + Rescale>(m: &R, lambda: f64, epsilon: f64) -> Result<ScaleInvariance> {
    let g = m.rescaled(lambda)?;
    let a = evaluate_functionals(m, epsilon)?;
    let b = evaluate_functionals(&g, epsilon)?;
    Ok(ScaleInvariance {
        lambda,
        s2_deviation: rel_dev(a.s2, b.s2),
        s2_minus_deviation: rel_dev(a.s2_minus, b.s2_minus),
        i_eps_deviation: rel_dev(a.i_eps, b.i_eps),
        z2_deviation: rel_dev(a.z2, b.z2 * lambda),
        volume_deviation: rel_dev(a.volume * lambda.powi(3), b.volume),
        original: a,
        rescaled: b,
    })
}

/// Diagonal tensor components in the frame `(E_t, E_1, E_2)`.
type Diag<const N: usize> = [Jet<N>; 3];

/// Hessian of a radial function with arclength jet `u`.
fn hessian<const N: usize>(loc: &Local<N>, u: Jet<N>) -> Diag<N> {
    let k = loc.kappa();
    let du = u.diff();
    [du.diff(), k[0] * du, k[1] * du]
}

fn laplacian<const N: usize>(loc: &Local<N>, u: Jet<N>) -> Jet<N> {
    let h = hessian(loc, u);
    h[0] + h[1] + h[2]
}

/// `L* u = D^2 u - (Delta u) g - u Ric`.
fn l_star_jet<const N: usize>(loc: &Local<N>, u: Jet<N>) -> Diag<N> {
    let h = hessian(loc, u);
    let lap = h[0] + h[1] + h[2];
    let r = loc.ricci();
    [h[0] - lap - u * r[0], h[1] - lap - u * r[1], h[2] - lap - u * r[2]]
}

/// Gradient of `Z^2 = int |z|^2`:
/// `D*D z + D^2 s / 3 - 2 R(z) + (|z|^2 - Delta s / 3) g / 2`.
pub fn z2_gradient<const N: usize>(loc: &Local<N>) -> Diag<N> {
    let z = loc.traceless_ricci();
    let [k_r1, k_r2, k_12] = loc.sectional();
    let r = loc.ricci();
    let s = r[0] + r[1] + r[2];
    let k = loc.kappa();
    let lap_a = laplacian(loc, z[0]);
    let lap_b1 = laplacian(loc, z[1]);
    let lap_b2 = laplacian(loc, z[2]);
    let c1 = k[0] * k[0] * (z[0] - z[1]) * 2.0;
    let c2 = k[1] * k[1] * (z[0] - z[2]) * 2.0;
    let rough = [lap_a - c1 - c2, lap_b1 + c1, lap_b2 + c2];
    let rz = [
        k_r1 * z[1] + k_r2 * z[2],
        k_r1 * z[0] + k_12 * z[2],
        k_r2 * z[0] + k_12 * z[1],
    ];
    let hs = hessian(loc, s);
    let lap_s = hs[0] + hs[1] + hs[2];
    let zz = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    let iso = (zz - lap_s / 3.0) * 0.5;
    let mut out = [Jet::constant(0.0); 3];
    for i in 0..3 {
        out[i] = -rough[i] + hs[i] / 3.0 - rz[i] * 2.0 + iso;
    }
    out
}

/// Divergence of a diagonal symmetric tensor; only the radial component
/// can be nonzero.
pub fn divergence_radial<const N: usize>(loc: &Local<N>, t: &Diag<N>) -> Jet<N> {
    let k = loc.kappa();
    t[0].diff() + k[0] * (t[0] - t[1]) + k[1] * (t[0] - t[2])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LStarValue {
    pub point: f64,
    pub radial: f64,
    pub tangential: [f64; 2],
}

fn check_grid(m: &Metric1D, grid: &[f64]) -> Result<()> {
    for &x in grid {
        if !m.domain.contains(x) {
            return Err(MslError::GridOutOfDomain {
                point: x,
                lo: m.domain.lo,
                hi: m.domain.hi,
            });
        }
        for w in &m.warpings {
            let v = w.func.eval(x);
            if !(v > 0.0) {
                return Err(MslError::WarpingNonpositiveOnGrid { point: x, value: v });
            }
        }
    }
    Ok(())
}

/// `L* u` on the grid.
pub fn l_star(m: &Metric1D, u: &RadialFn, grid: &[f64]) -> Result<Vec<LStarValue>> {
    check_grid(m, grid)?;
    Ok(grid
        .iter()
        .map(|&x| {
            let loc = m.local::<4>(x);
            let l = l_star_jet(&loc, loc.pull(u));
            LStarValue {
                point: x,
                radial: l[0].value(),
                tangential: [l[1].value(), l[2].value()],
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationResidual {
    pub name: String,
    #[serde(with = "dec17")]
    pub sup_norm: f64,
    #[serde(with = "dec17")]
    pub l2_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub grid_points: usize,
    pub components: Vec<EquationResidual>,
}

impl ResidualReport {
    pub fn sup_norm(&self) -> f64 {
        self.components.iter().map(|c| c.sup_norm).fold(0.0, f64::max)
    }
}

/// Sup and discrete L^2 (trapezoidal in the volume measure) norms.
fn norms(m: &Metric1D, grid: &[f64], values: &[f64]) -> (f64, f64) {
    let sup = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut l2 = 0.0;
    for i in 1..grid.len() {
        let w = 0.5 * (grid[i] - grid[i - 1]);
        l2 +=
            w * (values[i - 1].powi(2) * m.volume_density(grid[i - 1]) + values[i].powi(2) * m.volume_density(grid[i]));
    }
    (sup, l2.sqrt())
}

fn reject_sampled(m: &Metric1D, extra: &RadialFn) -> Result<()> {
    if m.warpings.iter().any(|w| w.func.is_sampled()) || extra.is_sampled() {
        return Err(MslError::InsufficientSmoothness(
            "fourth derivatives of sampled warpings are not available; supply closed forms or Hermite splines".into(),
        ));
    }
    Ok(())
}

/// Residual of the static vacuum system `L* u = 0`, `Delta u = 0`.
pub fn static_vacuum_residual(m: &Metric1D, u: &RadialFn, grid: &[f64]) -> Result<ResidualReport> {
    check_grid(m, grid)?;
    let mut tensor = Vec::with_capacity(grid.len());
    let mut trace = Vec::with_capacity(grid.len());
    for &x in grid {
        let loc = m.local::<4>(x);
        let uj = loc.pull(u);
        let l = l_star_jet(&loc, uj);
        tensor.push(l.iter().map(|c| c.value().abs()).fold(0.0, f64::max));
        trace.push(laplacian(&loc, uj).value());
    }
    let (ts, tl) = norms(m, grid, &tensor);
    let (ls, ll) = norms(m, grid, &trace);
    Ok(ResidualReport {
        equation: "static_vacuum".into(),
        grid_points: grid.len(),
        components: vec![
            EquationResidual {
                name: "l_star".into(),
                sup_norm: ts,
                l2_norm: tl,
            },
            EquationResidual {
                name: "laplacian".into(),
                sup_norm: ls,
                l2_norm: ll,
            },
        ],
    })
}

/// Residual of the critical-point system
/// `alpha grad Z^2 + L* tau = 0`, `Delta(tau + alpha s / 12) + alpha |z|^2 / 4 = 0`.
pub fn zc2_residual(m: &Metric1D, tau: &RadialFn, alpha: f64, grid: &[f64]) -> Result<ResidualReport> {
    reject_sampled(m, tau)?;
    check_grid(m, grid)?;
    let mut tensor = Vec::with_capacity(grid.len());
    let mut trace = Vec::with_capacity(grid.len());
    for &x in grid {
        let loc = m.local::<6>(x);
        let t = loc.pull(tau);
        let l = l_star_jet(&loc, t);
        let g = z2_gradient(&loc);
        tensor.push(
            (0..3)
                .map(|i| (g[i].value() * alpha + l[i].value()).abs())
                .fold(0.0, f64::max),
        );
        let r = loc.ricci();
        let s = r[0] + r[1] + r[2];
        let z = loc.traceless_ricci();
        let zz: f64 = z.iter().map(|c| c.value() * c.value()).sum();
        trace.push(laplacian(&loc, t + s * (alpha / 12.0)).value() + 0.25 * alpha * zz);
    }
    let (ts, tl) = norms(m, grid, &tensor);
    let (ls, ll) = norms(m, grid, &trace);
    Ok(ResidualReport {
        equation: "zc2".into(),
        grid_points: grid.len(),
        components: vec![
            EquationResidual {
                name: "tensor".into(),
                sup_norm: ts,
                l2_norm: tl,
            },
            EquationResidual {
                name: "trace".into(),
                sup_norm: ls,
                l2_norm: ll,
            },
        ],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalRicciReport {
    pub grid: Vec<f64>,
    /// Ricci eigenvalues of `u^2 g` computed directly from its warpings.
    pub direct: Vec<[f64; 3]>,
    /// Ricci eigenvalues of `u^2 g` from the transformation law.
    pub transformed: Vec<[f64; 3]>,
    #[serde(with = "dec17")]
    pub max_deviation: f64,
}

fn conformal_law<const N: usize>(loc: &Local<N>, u: Jet<N>) -> [f64; 3] {
    let r = loc.ricci();
    let h = hessian(loc, u);
    let lap = (h[0] + h[1] + h[2]).value();
    let uv = u.value();
    let du = u.derivative(1);
    let tensor = [
        r[0].value() - h[0].value() / uv + 2.0 * du * du / (uv * uv) - lap / uv,
        r[1].value() - h[1].value() / uv - lap / uv,
        r[2].value() - h[2].value() / uv - lap / uv,
    ];
    tensor.map(|c| c / (uv * uv))
}

/// Ricci curvature of `u^2 g` two ways.
pub fn conformal_ricci(m: &Metric1D, u: &RadialFn, grid: &[f64]) -> Result<ConformalRicciReport> {
    check_grid(m, grid)?;
    let g = m.conformal(u);
    let mut direct = Vec::with_capacity(grid.len());
    let mut transformed = Vec::with_capacity(grid.len());
    let mut dev = 0.0f64;
    for &x in grid {
        let loc = m.local::<4>(x);
        let t = conformal_law(&loc, loc.pull(u));
        let d = g.local::<4>(x).ricci().map(|c| c.value());
        for i in 0..3 {
            dev = dev.max((t[i] - d[i]).abs());
        }
        direct.push(d);
        transformed.push(t);
    }
    Ok(ConformalRicciReport {
        grid: grid.to_vec(),
        direct,
        transformed,
        max_deviation: dev,
    })
}

/// Largest deviation of the Ricci tensor of `(1 + delta nu)^2 g`, written in
/// a `g`-orthonormal frame, from its linearization
/// `Ric - delta (D^2 nu + (Delta nu) g)`.
pub fn conformal_ricci_first_order(m: &Metric1D, nu: &RadialFn, delta: f64, grid: &[f64]) -> Result<f64> {
    check_grid(m, grid)?;
    let u = RadialFn::Affine {
        slope: 0.0,
        intercept: 1.0,
    }
    .plus(nu.clone().scaled(delta));
    let g = m.conformal(&u);
    let mut dev = 0.0f64;
    for &x in grid {
        let loc = m.local::<4>(x);
        let n = loc.pull(nu);
        let h = hessian(&loc, n);
        let lap = (h[0] + h[1] + h[2]).value();
        let r = loc.ricci();
        let uu = u.eval(x).powi(2);
        let exact = g.local::<4>(x).ricci();
        for i in 0..3 {
            let predicted = r[i].value() - delta * (h[i].value() + lap);
            dev = dev.max((exact[i].value() * uu - predicted).abs());
        }
    }
    Ok(dev)
}
