//! Radial functions of the transverse coordinate: closed forms with exact
//! derivatives, combinators, Hermite splines and tabulated samples.

use crate::error::{MslError, Result};
use crate::jet::Jet;
use crate::numeric::{PiecewisePolynomial, Samples};
use crate::serde_ext::ext_f64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum RadialFn {
    Constant {
        value: f64,
    },
    Affine {
        slope: f64,
        intercept: f64,
    },
    /// `radius * sin((t - phase) / radius)`
    Sine {
        radius: f64,
        phase: f64,
    },
    /// `radius * sinh((t - phase) / radius)`
    Sinh {
        radius: f64,
        phase: f64,
    },
    /// `scale * exp(rate * t)`
    Exponential {
        scale: f64,
        rate: f64,
    },
    /// `scale * tan(t / 2)`
    HalfTangent {
        scale: f64,
    },
    /// `scale * exp(-cos t)`
    ExpNegCos {
        scale: f64,
    },
    /// `coeff * (t + offset)^exponent`
    Power {
        coeff: f64,
        offset: f64,
        exponent: f64,
    },
    /// Area radius of the Schwarzschild metric against signed arclength from the horizon.
    SchwarzschildArea {
        mass: f64,
    },
    /// Warping of `(1 + 2m/r)(dr^2 + r^2 dOmega^2)` against arclength from `r = 0`.
    SchwarzschildConformal {
        mass: f64,
    },
    /// Static potential `(1 - 2m/r)^(1/2)` of the area-radius form, odd across the horizon.
    SchwarzschildPotential {
        mass: f64,
    },
    /// Coordinate `r` of the conformally flat form against its arclength.
    SchwarzschildChartRadius {
        mass: f64,
    },
    /// `inner(t - shift)`
    Translate {
        inner: Box<RadialFn>,
        shift: f64,
    },
    /// `inner(2 center - t)`
    Reflect {
        inner: Box<RadialFn>,
        center: f64,
    },
    /// `amplitude * inner(t / lambda)`
    Rescale {
        inner: Box<RadialFn>,
        lambda: f64,
        amplitude: f64,
    },
    Sum {
        terms: Vec<RadialFn>,
    },
    Product {
        factors: Vec<RadialFn>,
    },
    Pow {
        inner: Box<RadialFn>,
        exponent: f64,
    },
    Spline {
        poly: PiecewisePolynomial,
    },
    Sampled {
        samples: Samples,
    },
}

/// How derivatives of a warping are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarpKind {
    ClosedForm,
    Hermite,
    Sampled,
}

/// Solves `sinh(2 eta) + 2 eta = tau`.
fn schwarzschild_eta_scalar(tau: f64) -> f64 {
    if tau < 0.0 {
        return -schwarzschild_eta_scalar(-tau);
    }
    if tau == 0.0 {
        return 0.0;
    }
    let mut eta = 0.5 * (0.5 * tau).asinh();
    for _ in 0..100 {
        let g = (2.0 * eta).sinh() + 2.0 * eta - tau;
        let dg = 2.0 * (2.0 * eta).cosh() + 2.0;
        let step = g / dg;
        eta -= step;
        if step.abs() <= 1e-16 * (1.0 + eta.abs()) {
            break;
        }
    }
    eta
}

/// The smooth coordinate `eta` with `t = m (sinh 2 eta + 2 eta)`; both
/// Schwarzschild forms share it.
pub fn schwarzschild_eta<const N: usize>(t: Jet<N>, m: f64) -> Jet<N> {
    let e0 = schwarzschild_eta_scalar(t.value() / m);
    let mut e = Jet::<N>::constant(e0);
    for _ in 0..N {
        let c = e.cosh();
        e = ((c * c) * (4.0 * m)).recip().integrate(e0);
    }
    Jet::compose(&e, &t)
}

/// Inverse of `schwarzschild_eta`.
pub fn schwarzschild_t_of_eta(eta: f64, m: f64) -> f64 {
    m * ((2.0 * eta).sinh() + 2.0 * eta)
}

impl RadialFn {
    pub fn constant(value: f64) -> Self {
        RadialFn::Constant { value }
    }

    pub fn translate(self, shift: f64) -> Self {
        if shift == 0.0 {
            return self;
        }
        RadialFn::Translate {
            inner: Box::new(self),
            shift,
        }
    }

    pub fn reflect(self, center: f64) -> Self {
        RadialFn::Reflect {
            inner: Box::new(self),
            center,
        }
    }

    pub fn rescale(self, lambda: f64, amplitude: f64) -> Self {
        RadialFn::Rescale {
            inner: Box::new(self),
            lambda,
            amplitude,
        }
    }

    pub fn times(self, other: RadialFn) -> Self {
        RadialFn::Product {
            factors: vec![self, other],
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        self.rescale(1.0, factor)
    }

    pub fn plus(self, other: RadialFn) -> Self {
        RadialFn::Sum {
            terms: vec![self, other],
        }
    }

    pub fn pow(self, exponent: f64) -> Self {
        RadialFn::Pow {
            inner: Box::new(self),
            exponent,
        }
    }

    /// Hermite spline through values and first derivatives (cubic pieces) or
    /// values, first and second derivatives (quintic pieces).
    pub fn hermite(knots: &[f64], data: &[Vec<f64>]) -> Result<Self> {
        Ok(RadialFn::Spline {
            poly: PiecewisePolynomial::hermite(knots, data)?,
        })
    }

    pub fn sampled(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(RadialFn::Sampled {
            samples: Samples::new(t, values)?,
        })
    }

    pub fn jet<const N: usize>(&self, t: Jet<N>) -> Jet<N> {
        use RadialFn::*;
        match self {
            Constant { value } => Jet::constant(*value),
            Affine { slope, intercept } => t * *slope + *intercept,
            Sine { radius, phase } => ((t - *phase) / *radius).sin() * *radius,
            Sinh { radius, phase } => ((t - *phase) / *radius).sinh() * *radius,
            Exponential { scale, rate } => (t * *rate).exp() * *scale,
            HalfTangent { scale } => (t * 0.5).tan() * *scale,
            ExpNegCos { scale } => (-t.cos()).exp() * *scale,
            Power {
                coeff,
                offset,
                exponent,
            } => (t + *offset).powf(*exponent) * *coeff,
            SchwarzschildArea { mass } => {
                let c = schwarzschild_eta(t, *mass).cosh();
                c * c * (2.0 * mass)
            }
            SchwarzschildConformal { mass } => (schwarzschild_eta(t, *mass) * 2.0).sinh() * *mass,
            SchwarzschildPotential { mass } => schwarzschild_eta(t, *mass).tanh(),
            SchwarzschildChartRadius { mass } => {
                let s = schwarzschild_eta(t, *mass).sinh();
                s * s * (2.0 * mass)
            }
            Translate { inner, shift } => inner.jet(t - *shift),
            Reflect { inner, center } => inner.jet(-t + 2.0 * center),
            Rescale {
                inner,
                lambda,
                amplitude,
            } => inner.jet(t / *lambda) * *amplitude,
            Sum { terms } => terms.iter().fold(Jet::constant(0.0), |acc, f| acc + f.jet(t)),
            Product { factors } => factors.iter().fold(Jet::constant(1.0), |acc, f| acc * f.jet(t)),
            Pow { inner, exponent } => inner.jet(t).powf(*exponent),
            Spline { poly } => poly.jet(t),
            Sampled { samples } => samples.jet(t),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.jet::<1>(Jet::variable(t)).value()
    }

    /// Value and derivatives up to order `N - 1`.
    pub fn derivs<const N: usize>(&self, t: f64) -> [f64; N] {
        self.jet::<N>(Jet::variable(t)).derivatives()
    }

    pub fn is_sampled(&self) -> bool {
        use RadialFn::*;
        match self {
            Sampled { .. } => true,
            Translate { inner, .. } | Reflect { inner, .. } | Rescale { inner, .. } | Pow { inner, .. } => {
                inner.is_sampled()
            }
            Sum { terms } => terms.iter().any(|f| f.is_sampled()),
            Product { factors } => factors.iter().any(|f| f.is_sampled()),
            _ => false,
        }
    }

    fn has_spline(&self) -> bool {
        use RadialFn::*;
        match self {
            Spline { .. } => true,
            Translate { inner, .. } | Reflect { inner, .. } | Rescale { inner, .. } | Pow { inner, .. } => {
                inner.has_spline()
            }
            Sum { terms } => terms.iter().any(|f| f.has_spline()),
            Product { factors } => factors.iter().any(|f| f.has_spline()),
            _ => false,
        }
    }

    pub fn kind(&self) -> WarpKind {
        if self.is_sampled() {
            WarpKind::Sampled
        } else if self.has_spline() {
            WarpKind::Hermite
        } else {
            WarpKind::ClosedForm
        }
    }
}

/// Closed interval of the transverse coordinate; `hi` may be `+inf` and
/// `lo` may be `-inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    #[serde(with = "ext_f64")]
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(hi > lo) {
            return Err(MslError::InvalidInput(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-12 * (1.0 + x.abs());
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }
}

/// A warping function with the interval on which it is declared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpFn {
    pub func: RadialFn,
    pub domain: Interval,
}

impl WarpFn {
    pub fn new(func: RadialFn, domain: Interval) -> Self {
        Self { func, domain }
    }

    pub fn kind(&self) -> WarpKind {
        self.func.kind()
    }
}
