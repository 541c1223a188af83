//! Hermite and piecewise-polynomial interpolation.

use crate::error::{MslError, Result};
use crate::jet::Jet;
use serde::{Deserialize, Serialize};

/// Cubic through `(x0, f0, f0')` and `(x1, f1, f1')`, as monomial
/// coefficients in `t - x0`.
pub fn cubic_hermite(x0: f64, x1: f64, left: [f64; 2], right: [f64; 2]) -> Vec<f64> {
    let h = x1 - x0;
    let d0 = right[0] - left[0] - left[1] * h;
    let d1 = right[1] - left[1];
    vec![
        left[0],
        left[1],
        (3.0 * d0 - d1 * h) / (h * h),
        (-2.0 * d0 + d1 * h) / (h * h * h),
    ]
}

/// Quintic matching value, first and second derivative at both ends, as
/// monomial coefficients in `t - x0`.
pub fn quintic_hermite(x0: f64, x1: f64, left: [f64; 3], right: [f64; 3]) -> Vec<f64> {
    let h = x1 - x0;
    let a0 = left[0];
    let a1 = left[1];
    let a2 = 0.5 * left[2];
    let d0 = right[0] - (a0 + a1 * h + a2 * h * h);
    let d1 = (right[1] - (a1 + 2.0 * a2 * h)) * h;
    let d2 = (right[2] - 2.0 * a2) * h * h;
    vec![
        a0,
        a1,
        a2,
        (10.0 * d0 - 4.0 * d1 + 0.5 * d2) / h.powi(3),
        (-15.0 * d0 + 7.0 * d1 - d2) / h.powi(4),
        (6.0 * d0 - 3.0 * d1 + 0.5 * d2) / h.powi(5),
    ]
}

/// Piecewise polynomial; piece `i` lives on `[knots[i], knots[i+1]]` with
/// coefficients in the local variable `t - knots[i]`. Outside the knot span
/// the end pieces are extended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePolynomial {
    pub knots: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    pub fn new(knots: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if knots.len() < 2 || coeffs.len() + 1 != knots.len() {
            return Err(MslError::InvalidInput(
                "piecewise polynomial needs n+1 knots for n pieces".into(),
            ));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(MslError::InvalidInput("knots must be strictly increasing".into()));
        }
        Ok(Self { knots, coeffs })
    }

    /// Hermite interpolant of order 1 (cubic) or 2 (quintic) through the
    /// derivative data at each knot.
    pub fn hermite(knots: &[f64], data: &[Vec<f64>]) -> Result<Self> {
        if knots.len() != data.len() || knots.len() < 2 {
            return Err(MslError::InvalidInput("Hermite data must match knots".into()));
        }
        let order = data[0].len();
        if data.iter().any(|d| d.len() != order) || !(order == 2 || order == 3) {
            return Err(MslError::InvalidInput(
                "Hermite data needs 2 or 3 entries per knot".into(),
            ));
        }
        let coeffs = knots
            .windows(2)
            .zip(data.windows(2))
            .map(|(k, d)| {
                if order == 2 {
                    cubic_hermite(k[0], k[1], [d[0][0], d[0][1]], [d[1][0], d[1][1]])
                } else {
                    quintic_hermite(k[0], k[1], [d[0][0], d[0][1], d[0][2]], [d[1][0], d[1][1], d[1][2]])
                }
            })
            .collect();
        Self::new(knots.to_vec(), coeffs)
    }

    fn piece(&self, t: f64) -> usize {
        let n = self.coeffs.len();
        match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    pub fn jet<const N: usize>(&self, t: Jet<N>) -> Jet<N> {
        let i = self.piece(t.value());
        Jet::polynomial(&self.coeffs[i], &t, self.knots[i])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.jet::<1>(Jet::variable(t)).value()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }
}

/// Samples for a tabulated function; interpolated by local cubic Lagrange
/// polynomials through the four nearest samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() || t.len() < 4 {
            return Err(MslError::InvalidInput(
                "sampled function needs at least four samples".into(),
            ));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(MslError::InvalidInput(
                "sample abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { t, values })
    }

    pub fn jet<const N: usize>(&self, x: Jet<N>) -> Jet<N> {
        let n = self.t.len();
        let v = x.value();
        let i = match self
            .t
            .binary_search_by(|k| k.partial_cmp(&v).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => i,
        };
        let start = i.saturating_sub(2).min(n - 4);
        let mut acc = Jet::constant(0.0);
        for a in start..start + 4 {
            let mut basis = Jet::constant(self.values[a]);
            for b in start..start + 4 {
                if a != b {
                    basis = basis * ((x - self.t[b]) / (self.t[a] - self.t[b]));
                }
            }
            acc = acc + basis;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn quintic_reproduces_quintic() {
        let p = |t: f64| 1.0 + t - 2.0 * t * t + 0.5 * t.powi(3) + 0.1 * t.powi(5);
        let dp = |t: f64| 1.0 - 4.0 * t + 1.5 * t * t + 0.5 * t.powi(4);
        let ddp = |t: f64| -4.0 + 3.0 * t + 2.0 * t.powi(3);
        let c = quintic_hermite(0.5, 2.0, [p(0.5), dp(0.5), ddp(0.5)], [p(2.0), dp(2.0), ddp(2.0)]);
        let pp = PiecewisePolynomial::new(vec![0.5, 2.0], vec![c]).unwrap();
        for t in [0.5, 0.9, 1.3, 2.0] {
            assert_relative_eq!(pp.eval(t), p(t), max_relative = 1e-12);
        }
    }

    #[test]
    fn samples_reproduce_cubic() {
        let t: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let v: Vec<f64> = t.iter().map(|x| x * x * x - x).collect();
        let s = Samples::new(t, v).unwrap();
        let j = s.jet::<3>(Jet::variable(1.1));
        assert_relative_eq!(j.value(), 1.1f64.powi(3) - 1.1, max_relative = 1e-12);
        assert_relative_eq!(j.derivative(2), 6.6, max_relative = 1e-10);
    }

    proptest! {
        #[test]
        fn quintic_matches_end_data(l in prop::array::uniform3(-3.0f64..3.0), r in prop::array::uniform3(-3.0f64..3.0), h in 0.1f64..4.0) {
            let c = quintic_hermite(1.0, 1.0 + h, l, r);
            let pp = PiecewisePolynomial::new(vec![1.0, 1.0 + h], vec![c]).unwrap();
            let jl = pp.jet::<3>(Jet::variable(1.0));
            let jr = pp.jet::<3>(Jet::variable(1.0 + h));
            for k in 0..3 {
                prop_assert!((jl.derivative(k) - l[k]).abs() < 1e-9);
                prop_assert!((jr.derivative(k) - r[k]).abs() < 1e-7 * (1.0 + h.powi(-2)));
            }
        }
    }
}
