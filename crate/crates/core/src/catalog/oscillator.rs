use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_all, solve_linear_ode2, Dual2, Grid, OdeOptions, SampledFunction, Scalar,
};
use crate::specfun::{gamma_fn, hermite, hyp1f1};
use crate::susy_core::{
    chain_from_lambda_derivative, chain_wronskian, JordanChain, LambdaDerivativeOptions,
};

use super::{ModelSystem, SystemParams};

/// `e^{−x²/2} [c1 ₁F₁((1−A)/4; 1/2; x²) + c2 x ₁F₁((3−A)/4; 3/2; x²)]`.
fn generator_at(a: f64, c1: f64, c2: f64, x: Dual2) -> Result<Dual2> {
    let x2 = x * x;
    let even = if c1 == 0.0 {
        Dual2::cst(0.0)
    } else {
        hyp1f1((1.0 - a) / 4.0, 0.5, x2)? * c1
    };
    let odd = if c2 == 0.0 {
        Dual2::cst(0.0)
    } else {
        x * hyp1f1((3.0 - a) / 4.0, 1.5, x2)? * c2
    };
    Ok((-(x2 * 0.5)).exp() * (even + odd))
}

fn generator_jets(grid: &Grid, a: f64, c1: f64, c2: f64) -> Result<Vec<Dual2>> {
    let jets = grid
        .points()
        .iter()
        .map(|&x| generator_at(a, c1, c2, Dual2::var(x)))
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = jets.iter().map(|j| j.v).collect();
    let nodes = crate::numerics::sampled::sign_changes(&vals);
    if !nodes.is_empty() || vals.contains(&0.0) {
        let mut locations: Vec<f64> = nodes.iter().map(|&i| grid.x(i)).collect();
        locations.extend(
            grid.points()
                .iter()
                .zip(&vals)
                .filter(|(_, v)| **v == 0.0)
                .map(|(x, _)| *x),
        );
        return Err(Error::NodalGenerator { locations });
    }
    Ok(jets)
}

pub(super) fn generator(grid: &Arc<Grid>, a: f64, c1: f64, c2: f64) -> Result<SampledFunction> {
    let jets = generator_jets(grid, a, c1, c2)?;
    SampledFunction::new(
        grid.clone(),
        jets.iter().map(|j| j.v).collect(),
        jets.iter().map(|j| j.d).collect(),
    )?
    .with_exact_second(jets.iter().map(|j| j.dd).collect())
}

/// `q0 = g'/g` with `q0' = g''/g − q0²`.
pub(super) fn q0(grid: &Arc<Grid>, a: f64, c1: f64, c2: f64) -> Result<SampledFunction> {
    let jets = generator_jets(grid, a, c1, c2)?;
    let q: Vec<f64> = jets.iter().map(|j| j.d / j.v).collect();
    let dq = jets
        .iter()
        .zip(&q)
        .map(|(j, q)| j.dd / j.v - q * q)
        .collect();
    SampledFunction::new(grid.clone(), q, dq)
}

pub(super) fn psi1<T: Scalar>(n: usize, x: T) -> T {
    (-(x * x) * 0.5).exp() * hermite(n, x)
}

/// `2Γ((3−λ−A)/4) / Γ((1−λ−A)/4)`, the odd-to-even weight of the solution at
/// energy `λ` that decays at `−∞`.
pub fn oscillator_gamma_ratio(a: f64, lambda: f64) -> Result<f64> {
    let num = gamma_fn((3.0 - lambda - a) / 4.0)?;
    let den = gamma_fn((1.0 - lambda - a) / 4.0)?;
    Ok(2.0 * num / den)
}

fn oscillator_a(sys: &ModelSystem) -> Result<f64> {
    match *sys.params() {
        SystemParams::Oscillator { a, .. } => Ok(a),
        _ => Err(Error::InvalidArgument(format!(
            "{} is not the oscillator system",
            sys.name()
        ))),
    }
}

/// Solution at energy `λ` decaying at the left end, integrated from there and
/// scaled to `u0(0) = 1`.
pub fn oscillator_u0(sys: &ModelSystem, lambda: f64) -> Result<SampledFunction> {
    let a = oscillator_a(sys)?;
    let g = sys.grid();
    let coeff: Vec<f64> = g.points().iter().map(|x| x * x - a - lambda).collect();
    let y = solve_linear_ode2(&coeff, None, g, 0.0, 1.0, 0, &OdeOptions::default())?;
    let at0 = y.value(g.index_of(0.0));
    if at0 == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "u0 vanishes at x = 0 for λ = {lambda}"
        )));
    }
    Ok(y.scale(1.0 / at0))
}

/// Order-2 insertion chain `u0`, `u1 = ∂u0/∂λ + B v0` with `W(u0, v0) = 1`.
/// `W(u0, ∂u0/∂λ) = −∫_{−∞}^x u0²`, so `B < 0` or `B > ∫u0²` keeps `W` nodeless.
pub fn oscillator_insertion_setup(sys: &ModelSystem, lambda: f64, b: f64) -> Result<JordanChain> {
    oscillator_gamma_ratio(oscillator_a(sys)?, lambda)?;
    let family = |l: f64| oscillator_u0(sys, l);
    let opts = LambdaDerivativeOptions {
        richardson: true,
        ..Default::default()
    };
    let chain = chain_from_lambda_derivative(family, &sys.u0(), lambda, None, b, &opts)?;
    let w = chain_wronskian(&chain, crate::susy_core::wronskian::DEFAULT_TAU_NODE)?;
    if !w.nodeless_interior {
        let total = integrate_all(&chain.u0().mul(chain.u0())?);
        let x = w.zero_positions().first().copied().unwrap_or(f64::NAN);
        return Err(Error::InadmissibleB {
            b,
            x,
            admissible: format!("B < 0 or B > {total:e}"),
        });
    }
    Ok(chain)
}
