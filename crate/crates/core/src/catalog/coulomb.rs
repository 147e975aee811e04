use crate::error::Result;
use crate::numerics::{Anchor, SampledFunction, Scalar};
use crate::specfun::laguerre;
use crate::susy_core::{chain_from_u0_integral, IntegralOptions, JordanChain};

use super::{ModelSystem, SystemParams};

pub(super) fn epsilon(ell: u32, n: usize) -> f64 {
    let l = ell as f64;
    1.0 / (l * l) - 1.0 / (n as f64 + l + 1.0).powi(2)
}

pub(super) fn q0<T: Scalar>(ell: u32, x: T) -> T {
    let l = ell as f64;
    -(x.recip() * l) + 1.0 / l
}

pub(super) fn u0<T: Scalar>(ell: u32, x: T) -> T {
    let l = ell as f64;
    (x * x).recip() * (l * (l + 1.0)) - x.recip() * 2.0 + 1.0 / (l * l)
}

pub(super) fn psi1<T: Scalar>(ell: u32, n: usize, x: T) -> T {
    let l = ell as f64;
    let k = n as f64 + l + 1.0;
    x.powi(ell as i32 + 1) * (-(x / k)).exp() * laguerre(n, 2.0 * l + 1.0, x * 2.0 / k)
}

/// Lower component at energy `e`; the `L_{n−1}` term is absent for `n = 0`.
pub(super) fn psi2<T: Scalar>(ell: u32, n: usize, e: f64, m: f64, x: T) -> T {
    let l = ell as f64;
    let nf = n as f64;
    let k = nf + l + 1.0;
    let z = x * 2.0 / k;
    let lower = if n == 0 {
        T::cst(0.0)
    } else {
        z * laguerre(n - 1, 2.0 * l + 2.0, z)
    };
    let bracket = x * ((nf + 2.0 * l + 1.0) / (l * k)) - (2.0 * l + 1.0);
    x.powi(ell as i32) * (-(x / k)).exp() * (lower + bracket * laguerre(n, 2.0 * l + 1.0, z))
        / (e + m)
}

/// `x^{−ℓ} e^{x/ℓ}`.
pub(super) fn generator<T: Scalar>(ell: u32, x: T) -> T {
    let l = ell as f64;
    x.powi(-(ell as i32)) * (x / l).exp()
}

/// Order-2 deletion chain at `λ = ε_{n0}` with `u0 = Ψ1` of level `n0` and
/// `W(u0, u1) = w0 − ∫_0^x u0²`. Returns the chain and `w0 = 0`, which
/// places the only zero of `W` at the singular endpoint.
pub fn coulomb_deletion_setup(sys: &ModelSystem, n0: usize) -> Result<(JordanChain, f64)> {
    let chain = coulomb_deletion_chain(sys, n0, 0.0)?;
    Ok((chain, 0.0))
}

/// As [`coulomb_deletion_setup`] with an arbitrary `w0`.
pub fn coulomb_deletion_chain(sys: &ModelSystem, n0: usize, w0: f64) -> Result<JordanChain> {
    coulomb_chain(sys, n0, w0, None)
}

/// As [`coulomb_deletion_chain`], adding the solution `û` at `λ` to `u1`.
pub fn coulomb_chain(
    sys: &ModelSystem,
    n0: usize,
    w0: f64,
    u_hat: Option<&SampledFunction>,
) -> Result<JordanChain> {
    if !matches!(sys.params(), SystemParams::Coulomb { .. }) {
        return Err(crate::Error::InvalidArgument(format!(
            "{} is not the Coulomb system",
            sys.name()
        )));
    }
    let u0 = sys.psi1(n0)?;
    // anchored at the peak, v0 carries no large multiple of u0
    let peak = Anchor::Index(u0.values().iter().enumerate().fold(0, |k, (i, v)| {
        if v.abs() > u0.value(k).abs() {
            i
        } else {
            k
        }
    }));
    let opts = IntegralOptions {
        inner_anchor: Anchor::Left,
        outer_anchor: peak,
        partner_anchor: peak,
        ..Default::default()
    };
    chain_from_u0_integral(&u0, &sys.u0(), sys.epsilon(n0), 2, u_hat, &[-w0], &opts)
}
