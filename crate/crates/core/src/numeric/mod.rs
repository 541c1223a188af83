//! Numerical utilities: quadrature, root finding, fitting, interpolation.

pub mod fit;
pub mod interp;
pub mod quadrature;
pub mod roots;

pub use fit::{least_squares, linear_fit, loglog_fit, observed_orders, LinearFit};
pub use interp::{cubic_hermite, quintic_hermite, PiecewisePolynomial, Samples};
pub use quadrature::{integrate, integrate_breakpoints, QuadOptions, Quadrature};
pub use roots::{brent, newton2, newton_bracketed, Newton2};

/// `n` points spread uniformly over `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` points spread logarithmically over `[a, b]` with `a, b > 0`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}
