//! First-order change of level-set shape operators under a conformal
//! perturbation `g' = (1 + 2 nu delta) g`.

use crate::error::Result;
use crate::metric::{shape_operator, Metric1D, Orientation};
use crate::radial::RadialFn;
use crate::serde_ext::dec17;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeDelta {
    #[serde(with = "dec17")]
    pub delta: f64,
    #[serde(with = "dec17")]
    pub radius: f64,
    /// `-<grad nu, X> delta`
    #[serde(with = "dec17")]
    pub predicted: f64,
    /// Averaged eigenvalues of `A_g / u - A_g'` with `u = (1 + 2 nu delta)^(1/2)`, from the two metrics.
    #[serde(with = "dec17")]
    pub exact: f64,
    /// `A_g - A_g'` including the dilation of the normal.
    #[serde(with = "dec17")]
    pub raw: f64,
    #[serde(with = "dec17")]
    pub gap: f64,
}

/// Compares the shape-operator change of the level set at `r` against its
/// first-order prediction. The pointwise dilation `A_g -> A_g / u` is
/// divided out before comparing; it carries the factor `A_g nu delta`,
/// which a global rescaling absorbs.
pub fn conformal_shape_delta(m: &Metric1D, nu: &RadialFn, delta: f64, r: f64) -> Result<ShapeDelta> {
    let u = RadialFn::constant(1.0).plus(nu.clone().scaled(2.0 * delta)).pow(0.5);
    let g2 = m.conformal(&u);
    let a = shape_operator(m, r, Orientation::Increasing)?.mean() / 2.0;
    let a2 = shape_operator(&g2, r, Orientation::Increasing)?.mean() / 2.0;
    let uv = u.eval(r);
    let dnu = nu.derivs::<2>(r)[1] / m.lapse(r);
    let predicted = -dnu * delta;
    let exact = a / uv - a2;
    Ok(ShapeDelta {
        delta,
        radius: r,
        predicted,
        exact,
        raw: a - a2,
        gap: exact - predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::observed_orders;
    use crate::radial::Interval;

    fn flat() -> Metric1D {
        Metric1D::spherical(
            RadialFn::Affine {
                slope: 1.0,
                intercept: 0.0,
            },
            Interval::new(0.0, 10.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_nu_is_pure_dilation() {
        let d = conformal_shape_delta(&flat(), &RadialFn::constant(0.3), 1e-3, 2.0).unwrap();
        assert_eq!(d.predicted, 0.0);
        assert!(d.exact.abs() < 1e-15);
        assert!(d.raw > 0.0);
    }

    #[test]
    fn gap_is_second_order() {
        let nu = RadialFn::Power {
            coeff: 1.0,
            offset: 0.0,
            exponent: -1.0,
        };
        let gaps: Vec<f64> = (0..8)
            .map(|k| {
                conformal_shape_delta(&flat(), &nu, 1e-2 / 2f64.powi(k), 2.0)
                    .unwrap()
                    .gap
                    .abs()
            })
            .collect();
        for p in observed_orders(&gaps) {
            assert!(p > 1.9, "{p}");
        }
    }

    #[test]
    fn mass_potential_reproduces_leading_gap() {
        // nu = m / r with delta = 1 gives the m / R^2 gap of the conformal model
        let m = 1.0;
        let nu = RadialFn::Power {
            coeff: m,
            offset: 0.0,
            exponent: -1.0,
        };
        let d = conformal_shape_delta(&flat(), &nu, 1e-6, 5.0).unwrap();
        assert!((d.predicted / 1e-6 - m / 25.0).abs() < 1e-12);
    }
}
