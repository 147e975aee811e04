//! Second-order forward-mode differentiation, used to sample closed forms
//! together with exact first and second derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real arithmetic shared by `f64` and [`Dual2`], so closed forms can be
/// written once.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }
    fn tan(self) -> Self {
        self.sin() / self.cos()
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
}

/// Truncated jet `(f, f', f'')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Dual2 {
    pub fn new(v: f64, d: f64, dd: f64) -> Self {
        Dual2 { v, d, dd }
    }

    /// The independent variable at `x`.
    pub fn var(x: f64) -> Self {
        Dual2 {
            v: x,
            d: 1.0,
            dd: 0.0,
        }
    }

    /// Chain rule for a scalar map with derivatives `(f, f', f'')` at `self.v`.
    fn compose(self, f: f64, df: f64, ddf: f64) -> Self {
        Dual2 {
            v: f,
            d: df * self.d,
            dd: ddf * self.d * self.d + df * self.dd,
        }
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, o: Dual2) -> Dual2 {
        Dual2::new(self.v + o.v, self.d + o.d, self.dd + o.dd)
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, o: Dual2) -> Dual2 {
        Dual2::new(self.v - o.v, self.d - o.d, self.dd - o.dd)
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, o: Dual2) -> Dual2 {
        Dual2::new(
            self.v * o.v,
            self.d * o.v + self.v * o.d,
            self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        )
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    fn div(self, o: Dual2) -> Dual2 {
        let w = self.v / o.v;
        let dw = (self.d - w * o.d) / o.v;
        let ddw = (self.dd - 2.0 * dw * o.d - w * o.dd) / o.v;
        Dual2::new(w, dw, ddw)
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2::new(-self.v, -self.d, -self.dd)
    }
}

impl Add<f64> for Dual2 {
    type Output = Dual2;
    fn add(self, c: f64) -> Dual2 {
        Dual2::new(self.v + c, self.d, self.dd)
    }
}

impl Sub<f64> for Dual2 {
    type Output = Dual2;
    fn sub(self, c: f64) -> Dual2 {
        Dual2::new(self.v - c, self.d, self.dd)
    }
}

impl Mul<f64> for Dual2 {
    type Output = Dual2;
    fn mul(self, c: f64) -> Dual2 {
        Dual2::new(self.v * c, self.d * c, self.dd * c)
    }
}

impl Div<f64> for Dual2 {
    type Output = Dual2;
    fn div(self, c: f64) -> Dual2 {
        Dual2::new(self.v / c, self.d / c, self.dd / c)
    }
}

impl Scalar for Dual2 {
    fn cst(v: f64) -> Self {
        Dual2::new(v, 0.0, 0.0)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.compose(self.v.ln(), r, -r * r)
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c)
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * self.v))
    }
    fn powi(self, n: i32) -> Self {
        let nf = n as f64;
        let f = self.v.powi(n);
        let df = if n == 0 { 0.0 } else { nf * self.v.powi(n - 1) };
        let ddf = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * self.v.powi(n - 2)
        };
        self.compose(f, df, ddf)
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        let sec2 = 1.0 + t * t;
        self.compose(t, sec2, 2.0 * t * sec2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual2::var(0.7);
        let f = x.sin() * x.exp() / (x * x + 1.0);
        let h = 1e-4;
        let g = |t: f64| t.sin() * t.exp() / (t * t + 1.0);
        let d = (g(0.7 + h) - g(0.7 - h)) / (2.0 * h);
        let dd = (g(0.7 + h) - 2.0 * g(0.7) + g(0.7 - h)) / (h * h);
        assert!((f.d - d).abs() < 1e-7);
        assert!((f.dd - dd).abs() < 1e-5);
    }

    #[test]
    fn tan_matches_sin_over_cos() {
        let x = Dual2::var(0.4);
        let a = Scalar::tan(x);
        let b = x.sin() / x.cos();
        assert!((a.v - b.v).abs() < 1e-15);
        assert!((a.d - b.d).abs() < 1e-14);
        assert!((a.dd - b.dd).abs() < 1e-13);
    }

    #[test]
    fn powi_edge_cases() {
        let x = Dual2::var(2.0);
        assert_eq!(x.powi(0), Dual2::cst(1.0));
        assert_eq!(x.powi(1), x);
        let p = x.powi(-2);
        assert!((p.d + 2.0 / 8.0).abs() < 1e-15);
        assert!((p.dd - 6.0 / 16.0).abs() < 1e-15);
    }
}
