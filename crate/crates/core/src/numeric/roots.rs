//! Scalar and two-dimensional root finding.

use crate::error::{MslError, Result};

/// Brent's method on a sign-changing bracket.
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(MslError::NoRoot(format!(
            "no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(MslError::NoRoot("Brent iteration limit reached".into()))
}

/// Newton iteration safeguarded by bisection inside `[lo, hi]`.
/// `f` returns the value and derivative.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(f: F, mut lo: f64, mut hi: f64, x0: f64, tol: f64) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(MslError::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    let increasing = fhi > flo;
    let mut x = x0.clamp(lo, hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == increasing {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - fx / dfx;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(MslError::NoRoot("Newton iteration limit reached".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Newton2 {
    pub x: [f64; 2],
    pub residual: [f64; 2],
    pub iterations: usize,
}

/// Damped Newton for two equations in two unknowns. `f` returns the
/// residual and Jacobian `j[i][k] = d f_i / d x_k`.
pub fn newton2<F: Fn([f64; 2]) -> ([f64; 2], [[f64; 2]; 2])>(
    f: F,
    x0: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Result<Newton2> {
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut x = x0;
    let (mut r, mut j) = f(x);
    for it in 0..max_iter {
        if norm(r) <= tol {
            return Ok(Newton2 {
                x,
                residual: r,
                iterations: it,
            });
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(MslError::NoRoot(format!("singular Jacobian at {x:?}")));
        }
        let dx = [
            (j[1][1] * r[0] - j[0][1] * r[1]) / det,
            (-j[1][0] * r[0] + j[0][0] * r[1]) / det,
        ];
        let mut step = 1.0;
        loop {
            let trial = [x[0] - step * dx[0], x[1] - step * dx[1]];
            let (rt, jt) = f(trial);
            if rt.iter().all(|v| v.is_finite()) && (norm(rt) < norm(r) || step < 1e-3) {
                x = trial;
                r = rt;
                j = jt;
                break;
            }
            step *= 0.5;
        }
    }
    if norm(r) <= tol {
        return Ok(Newton2 {
            x,
            residual: r,
            iterations: max_iter,
        });
    }
    Err(MslError::NoRoot(format!(
        "Newton did not reach residual {tol:e} (last {:e})",
        norm(r)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brent_finds_cos_root() {
        let x = brent(|x: f64| x.cos(), 1.0, 2.0, 1e-15).unwrap();
        assert_relative_eq!(x, std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn brent_rejects_no_sign_change() {
        assert!(matches!(
            brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(MslError::NoRoot(_))
        ));
    }

    #[test]
    fn safeguarded_newton_cubic() {
        let x = newton_bracketed(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 0.01, 1e-15).unwrap();
        assert_relative_eq!(x, 2f64.cbrt(), max_relative = 1e-14);
    }

    #[test]
    fn newton2_circle_line() {
        let sol = newton2(
            |x| {
                (
                    [x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]],
                    [[2.0 * x[0], 2.0 * x[1]], [1.0, -1.0]],
                )
            },
            [1.0, 0.2],
            1e-14,
            50,
        )
        .unwrap();
        assert_relative_eq!(sol.x[0], 0.5f64.sqrt(), max_relative = 1e-13);
    }
}
