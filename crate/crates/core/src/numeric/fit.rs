//! Least-squares fits.

use crate::error::{MslError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual of the fitted line.
    pub max_residual: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(MslError::InvalidInput(
            "linear fit needs at least two paired samples".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(MslError::InvalidInput("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        max_residual,
    })
}

/// Fits `ln y = slope * ln x + intercept`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(MslError::InvalidInput("log-log fit needs positive samples".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Solves the least-squares problem `min |A c - y|` for a small number of
/// columns using modified Gram-Schmidt. `columns[k][i]` is basis `k` at sample `i`.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let k = columns.len();
    let n = y.len();
    if k == 0 || n < k || columns.iter().any(|c| c.len() != n) {
        return Err(MslError::InvalidInput("ill-shaped least-squares problem".into()));
    }
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let d: f64 = (0..n).map(|t| q[i][t] * q[j][t]).sum();
            r[i][j] = d;
            for t in 0..n {
                q[j][t] -= d * q[i][t];
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(MslError::InvalidInput("rank-deficient least-squares basis".into()));
        }
        r[j][j] = norm;
        for t in 0..n {
            q[j][t] /= norm;
        }
    }
    let qty: Vec<f64> = (0..k).map(|j| (0..n).map(|t| q[j][t] * y[t]).sum()).collect();
    let mut c = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = qty[j];
        for i in j + 1..k {
            s -= r[j][i] * c[i];
        }
        c[j] = s / r[j][j];
    }
    Ok(c)
}

/// Observed convergence order from errors at consecutive step halvings.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [3.0, 5.0, 7.0];
        let fit = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 2.0);
        assert_relative_eq!(fit.intercept, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn power_law_slope() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64 * 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 * x.powf(-3.0)).collect();
        assert_relative_eq!(loglog_fit(&xs, &ys).unwrap().slope, -3.0, max_relative = 1e-12);
    }

    #[test]
    fn two_term_inverse_powers() {
        let xs: Vec<f64> = (0..20).map(|i| 10.0 * 1.2f64.powi(i)).collect();
        let cols = vec![
            xs.iter().map(|x| 1.0 / x).collect::<Vec<_>>(),
            xs.iter().map(|x| 1.0 / (x * x)).collect::<Vec<_>>(),
        ];
        let y: Vec<f64> = xs.iter().map(|x| 2.0 / x + 0.75 / (x * x)).collect();
        let c = least_squares(&cols, &y).unwrap();
        assert_relative_eq!(c[0], 2.0, max_relative = 1e-10);
        assert_relative_eq!(c[1], 0.75, max_relative = 1e-8);
    }
}
