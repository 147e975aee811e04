//! Orthogonal polynomials, hypergeometric series and the Gamma function.
//!
//! The polynomial and series routines are generic over [`Scalar`], so they
//! evaluate equally on `f64` and on [`crate::numerics::Dual2`] jets.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::Scalar;

pub const HYP1F1_TERM_CAP: usize = 10_000;

/// Generalized Laguerre polynomial `L_n^α(x)` by the three-term recurrence.
pub fn laguerre<T: Scalar>(n: usize, alpha: f64, x: T) -> T {
    let mut prev = T::cst(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = -x + (1.0 + alpha);
    for k in 1..n {
        let kf = k as f64;
        let next = ((-x + (2.0 * kf + 1.0 + alpha)) * cur - prev * (kf + alpha)) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite<T: Scalar>(n: usize, x: T) -> T {
    let mut prev = T::cst(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = x * 2.0;
    for k in 1..n {
        let next = x * cur * 2.0 - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// Kummer's function `₁F₁(a; b; x)` by direct summation.
pub fn hyp1f1<T: Scalar + Magnitude>(a: f64, b: f64, x: T) -> Result<T> {
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidArgument(format!(
            "1F1 parameter b = {b} is a nonpositive integer"
        )));
    }
    let mut sum = T::cst(1.0);
    let mut term = T::cst(1.0);
    let mut quiet = 0;
    for k in 0..HYP1F1_TERM_CAP {
        let kf = k as f64;
        if a + kf == 0.0 {
            return Ok(sum);
        }
        term = term * x * ((a + kf) / ((b + kf) * (kf + 1.0)));
        sum = sum + term;
        if !sum.magnitude().is_finite() {
            break;
        }
        // the derivative parts of a jet lag the values by a few terms, hence
        // several consecutive negligible terms are required
        if term.magnitude() <= f64::EPSILON * sum.magnitude() {
            quiet += 1;
            if quiet >= 4 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        a,
        b,
        x: x.value(),
        terms: HYP1F1_TERM_CAP,
    })
}

/// Terminating Gauss series `₂F₁(−n, b; c; x)`.
pub fn hyp2f1_poly<T: Scalar>(n: usize, b: f64, c: f64, x: T) -> Result<T> {
    if is_nonpositive_integer(c) && (-c as usize) < n {
        return Err(Error::InvalidArgument(format!(
            "2F1 parameter c = {c} is a nonpositive integer"
        )));
    }
    let a = -(n as f64);
    let mut sum = T::cst(1.0);
    let mut term = T::cst(1.0);
    for k in 0..n {
        let kf = k as f64;
        term = term * x * ((a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)));
        sum = sum + term;
    }
    Ok(sum)
}

/// Size of a value together with any derivative parts it carries.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for crate::numerics::Dual2 {
    fn magnitude(&self) -> f64 {
        self.v.abs().max(self.d.abs()).max(self.dd.abs())
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos approximation with reflection for `x < 1/2`).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc)
}
