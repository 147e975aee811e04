use crate::error::{Error, Result};
use crate::numerics::{Anchor, SampledFunction, Scalar};
use crate::specfun::hyp2f1_poly;
use crate::susy_core::{chain_from_u0_integral, IntegralOptions, JordanChain};

use super::{ModelSystem, SystemParams};

/// Inner integration constant of `u2` in this crate's chain convention,
/// where the middle member enters with the opposite sign.
pub const TRIG_INNER_CONSTANT: f64 = 1.0 / 20.0;

pub(super) fn q0<T: Scalar>(x: T) -> T {
    let t = x.tan();
    t * 2.0 + t.recip() * 2.0
}

pub(super) fn u0<T: Scalar>(x: T) -> T {
    let t2 = x.tan() * x.tan();
    t2 * 6.0 + t2.recip() * 2.0 + 8.0
}

pub(super) fn psi1<T: Scalar>(n: usize, x: T) -> Result<T> {
    let (s, c) = (x.sin(), x.cos());
    let nf = n as f64;
    Ok(c.powi(3) * s * s * hyp2f1_poly(n, nf + 5.0, 2.5, s * s)?)
}

/// Lower component at energy `e`, term by term as printed.
pub(super) fn psi2<T: Scalar>(n: usize, e: f64, m: f64, x: T) -> Result<T> {
    let (s, c) = (x.sin(), x.cos());
    let nf = n as f64;
    let z = s * s;
    let first = if n == 0 {
        T::cst(0.0)
    } else {
        c.powi(4)
            * s.powi(3)
            * (4.0 * nf * (nf + 5.0) / (5.0 * m + 5.0 * e))
            * hyp2f1_poly(n - 1, nf + 6.0, 3.5, z)?
    };
    let second = c * c * s.powi(3) * (5.0 / (m + e)) * hyp2f1_poly(n, nf + 5.0, 2.5, z)?;
    Ok(first + second)
}

/// The printed closed form of the second chain member.
pub fn trig_printed_u1<T: Scalar>(x: T) -> T {
    let c = |k: f64| (x * k).cos();
    let s = |k: f64| (x * k).sin();
    let num = x * (c(8.0) + c(6.0) * 2.0 - c(4.0) * 2.0 - c(2.0) * 6.0) * 4.0 - s(6.0)
        + s(4.0)
        + s(2.0) * 11.0;
    num / (x.cos() * x.cos() * x.sin() * 5120.0)
}

/// The printed closed form of the third chain member.
pub fn trig_printed_u2<T: Scalar>(x: T) -> T {
    let (sn, cs) = (x.sin(), x.cos());
    let c = |k: f64| (x * k).cos();
    let s = |k: f64| (x * k).sin();
    let lead = (x * 51.0 - 2560.0) * x.tan() / (cs * 256000.0);
    let brace = cs * ((x * x * 80.0) * c(4.0) - c(2.0) * 14.0 - x * x * 80.0 + 21.0) * 6.0
        + (-(x * 39.0) + 2560.0) * 5.0 / sn
        + cs.recip() * 153.0
        - (x * 21.0 - 2560.0) * (s(3.0) - sn * 2.0) * 8.0
        + (-(x * 3.0) + 1280.0) * s(5.0) * 16.0;
    lead + brace / 768000.0
}

/// Order-3 chain at `λ = 25` from `u0 = cos³x sin²x` with `û = 0`. Inner
/// integrals start at `x = 0` with constants `0` and [`TRIG_INNER_CONSTANT`];
/// the free multiples of `u0` are fixed by matching the closed forms at the
/// grid point nearest `π/4`.
pub fn trig_third_order_setup(sys: &ModelSystem) -> Result<JordanChain> {
    trig_chain(sys, &[0.0, TRIG_INNER_CONSTANT], None)
}

/// As [`trig_third_order_setup`] with arbitrary inner constants and a
/// solution `û` at `λ` added to every member above `u0`. The outer constants
/// are still fixed by matching the closed forms at `π/4`.
pub fn trig_chain(
    sys: &ModelSystem,
    inner: &[f64],
    u_hat: Option<&SampledFunction>,
) -> Result<JordanChain> {
    if !matches!(sys.params(), SystemParams::Trig) {
        return Err(Error::InvalidArgument(format!(
            "{} is not the trigonometric system",
            sys.name()
        )));
    }
    let u0 = sys.psi1(0)?;
    let pot = sys.u0();
    let lambda = sys.epsilon(0);
    let g = sys.grid();
    let k = g.index_of(std::f64::consts::FRAC_PI_4);
    let xk = g.x(k);
    let targets = [-trig_printed_u1(xk), trig_printed_u2(xk)];
    let mut opts = IntegralOptions {
        inner_anchor: Anchor::Left,
        outer_anchor: Anchor::Index(k),
        ..Default::default()
    };
    for j in 1..=2 {
        let trial = chain_from_u0_integral(&u0, &pot, lambda, j + 1, u_hat, inner, &opts)?;
        let a = (targets[j - 1] - trial.member(j).value(k)) / u0.value(k);
        opts.outer_constants.push(a);
    }
    chain_from_u0_integral(&u0, &pot, lambda, 3, u_hat, inner, &opts)
}
