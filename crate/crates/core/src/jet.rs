//! Truncated Taylor series ("jets") used to obtain exact derivatives of
//! closed-form warping functions.
//!
//! A `Jet<N>` stores the first `N` Taylor coefficients of a function about
//! a base point, so `derivative(k) = k! * coeff(k)`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    c: [f64; N],
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl<const N: usize> Jet<N> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Self { c }
    }

    /// The identity function expanded about `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn from_coeffs(c: [f64; N]) -> Self {
        Self { c }
    }

    pub fn from_derivatives(d: [f64; N]) -> Self {
        let mut c = [0.0; N];
        for k in 0..N {
            c[k] = d[k] / factorial(k);
        }
        Self { c }
    }

    pub fn coeffs(&self) -> &[f64; N] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k < N {
            self.c[k]
        } else {
            0.0
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn derivative(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    pub fn derivatives(&self) -> [f64; N] {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = self.derivative(k);
        }
        d
    }

    /// Jet of the derivative. The top coefficient is unknown after
    /// differentiation and is set to zero.
    pub fn diff(&self) -> Self {
        let mut c = [0.0; N];
        for k in 0..N.saturating_sub(1) {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Self { c }
    }

    /// Antiderivative taking the value `c0` at the base point.
    pub fn integrate(&self, c0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = c0;
        for k in 1..N {
            c[k] = self.c[k - 1] / k as f64;
        }
        Self { c }
    }

    /// The jet with its constant term removed.
    pub fn nilpotent(&self) -> Self {
        let mut c = self.c;
        c[0] = 0.0;
        Self { c }
    }

    /// Evaluates the power series `sum_k series_k (x - x0)^k` on the jet `x`,
    /// where `x0 = x.value()` is the expansion point of `series`.
    pub fn compose(series: &Self, x: &Self) -> Self {
        let h = x.nilpotent();
        let mut acc = Self::constant(series.c[N - 1]);
        for k in (0..N - 1).rev() {
            acc = acc * h + series.c[k];
        }
        acc
    }

    /// Evaluates a polynomial with monomial coefficients `p` in the
    /// variable `x - shift`.
    pub fn polynomial(p: &[f64], x: &Self, shift: f64) -> Self {
        let h = *x - shift;
        let mut acc = Self::constant(0.0);
        for &pk in p.iter().rev() {
            acc = acc * h + pk;
        }
        acc
    }

    pub fn recip(&self) -> Self {
        Self::constant(1.0) / *self
    }

    pub fn exp(&self) -> Self {
        let a = &self.c;
        let mut e = [0.0; N];
        e[0] = a[0].exp();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * a[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Self { c: e }
    }

    pub fn ln(&self) -> Self {
        let a = &self.c;
        let mut l = [0.0; N];
        l[0] = a[0].ln();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * l[j] * a[k - j];
            }
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Self { c: l }
    }

    pub fn powf(&self, p: f64) -> Self {
        let a = &self.c;
        let mut q = [0.0; N];
        q[0] = a[0].powf(p);
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += (p * j as f64 - (k - j) as f64) * a[j] * q[k - j];
            }
            q[k] = s / (k as f64 * a[0]);
        }
        Self { c: q }
    }

    pub fn powi(&self, n: i32) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..n.unsigned_abs() {
            acc = acc * *self;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.c;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc -= j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Self { c: s }, Self { c })
    }

    pub fn sinh_cosh(&self) -> (Self, Self) {
        let a = &self.c;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = a[0].sinh();
        c[0] = a[0].cosh();
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Self { c: s }, Self { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    pub fn sinh(&self) -> Self {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Self {
        self.sinh_cosh().1
    }

    pub fn tanh(&self) -> Self {
        let (s, c) = self.sinh_cosh();
        s / c
    }

    /// Converts between truncation orders, padding with zeros.
    pub fn truncate<const M: usize>(&self) -> Jet<M> {
        let mut c = [0.0; M];
        for k in 0..M.min(N) {
            c[k] = self.c[k];
        }
        Jet { c }
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for k in 0..N {
            self.c[k] += rhs.c[k];
        }
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for k in 0..N {
            self.c[k] -= rhs.c[k];
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..N - i {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Self { c }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b = &rhs.c;
        let mut q = [0.0; N];
        for k in 0..N {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= b[j] * q[k - j];
            }
            q[k] = s / b[0];
        }
        Self { c: q }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for v in self.c.iter_mut() {
            *v *= rhs;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(mut self, rhs: f64) -> Self {
        for v in self.c.iter_mut() {
            *v /= rhs;
        }
        self
    }
}

impl<const N: usize> Add<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn add(self, rhs: Jet<N>) -> Jet<N> {
        rhs + self
    }
}

impl<const N: usize> Sub<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn sub(self, rhs: Jet<N>) -> Jet<N> {
        -rhs + self
    }
}

impl<const N: usize> Mul<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn mul(self, rhs: Jet<N>) -> Jet<N> {
        rhs * self
    }
}

impl<const N: usize> Div<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn div(self, rhs: Jet<N>) -> Jet<N> {
        Jet::constant(self) / rhs
    }
}

impl<const N: usize> AddAssign for Jet<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> SubAssign for Jet<N> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const N: usize> MulAssign for Jet<N> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}
