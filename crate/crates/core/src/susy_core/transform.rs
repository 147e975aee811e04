//! Transformed potential `U1 = U0 − 2 (log W)'' + C` and transformed solutions.

use super::asymptotics::{frobenius_exponents, singularity_exponent};
use super::chain::JordanChain;
use super::wronskian::{chain_wronskian, extended_jet, Column, WronskianData, DEFAULT_TAU_NODE};
use crate::error::{Error, Result};
use crate::numerics::ode::{solve_linear_ode2, OdeOptions};
use crate::numerics::{fd_derivative, OdeContext, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    pub tau_node: f64,
    /// Build `U1` even when the Wronskian has interior zeros.
    pub allow_singular: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            tau_node: DEFAULT_TAU_NODE,
            allow_singular: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransformResult {
    pub chain: JordanChain,
    pub u0: SampledFunction,
    pub u1: SampledFunction,
    pub c: f64,
    pub wron: WronskianData,
}

impl TransformResult {
    /// `−2 (log W)''` pointwise.
    pub fn log_term(&self) -> Vec<f64> {
        log_term(&self.wron.w)
    }
}

fn log_term(w: &SampledFunction) -> Vec<f64> {
    let s = w.second_derivative();
    (0..w.len())
        .map(|i| {
            let r = w.deriv(i) / w.value(i);
            -2.0 * (s[i] / w.value(i) - r * r)
        })
        .collect()
}

pub fn transform_potential(
    chain: &JordanChain,
    c: f64,
    opts: &TransformOptions,
) -> Result<TransformResult> {
    let wron = chain_wronskian(chain, opts.tau_node)?;
    if !wron.nodeless_interior && !opts.allow_singular {
        let mut locations = wron.interior_zero_positions();
        if locations.is_empty() {
            locations = wron.zero_positions();
        }
        return Err(Error::SingularPotential { locations });
    }
    let u0 = chain.potential().clone();
    let lt = log_term(&wron.w);
    let vals: Vec<f64> = u0
        .values()
        .iter()
        .zip(&lt)
        .map(|(u, t)| u + t + c)
        .collect();
    let der = fd_derivative(&vals, u0.grid().step(), 1)?;
    let u1 = SampledFunction::new(u0.grid().clone(), vals, der)?;
    Ok(TransformResult {
        chain: chain.clone(),
        u0,
        u1,
        c,
        wron,
    })
}

/// Energy of a solution, read from its ODE context `ψ'' = (U0 − ε) ψ`.
pub fn solution_energy(potential: &SampledFunction, psi: &SampledFunction) -> Result<f64> {
    let ctx = psi.ode_context().ok_or_else(|| {
        Error::MissingOdeContext("solution carries no ODE relation; pass its energy".into())
    })?;
    if ctx.inhom.is_some() {
        return Err(Error::InvalidArgument(
            "solution satisfies an inhomogeneous equation".into(),
        ));
    }
    let n = psi.len();
    let eps: Vec<f64> = (0..n).map(|i| potential.value(i) - ctx.coeff[i]).collect();
    let mean = eps.iter().sum::<f64>() / n as f64;
    let spread = eps.iter().fold(0.0_f64, |m, e| m.max((e - mean).abs()));
    if spread > 1e-8 * mean.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "solution's ODE does not match the chain potential (energy spread {spread:e})"
        )));
    }
    Ok(mean)
}

/// `Φ = W(u0 … u_{N−1}, ψ) / W(u0 … u_{N−1})` for `ψ` with an ODE context.
pub fn transform_solution(chain: &JordanChain, psi: &SampledFunction) -> Result<SampledFunction> {
    let eps = solution_energy(chain.potential(), psi)?;
    transform_solution_at(chain, psi, eps)
}

/// As [`transform_solution`] for a solution at the given energy. The result
/// carries its exact second derivative.
pub fn transform_solution_at(
    chain: &JordanChain,
    psi: &SampledFunction,
    eps: f64,
) -> Result<SampledFunction> {
    psi.check_same_grid(chain.u0())?;
    let wron = chain_wronskian(chain, DEFAULT_TAU_NODE)?;
    let [a, da, dda, _] = extended_jet(chain, Column::Solution(psi, chain.lambda() - eps));
    quotient(&a, &da, &dda, &wron, chain)
}

/// Condition estimate `bound/|W(chain, ψ)|` above which the quotient is not
/// trusted near an end.
const CONDITION_LIMIT: f64 = 1e4;
/// Window fraction for the end exponent of the quotient.
const END_WINDOW: f64 = 0.01;

/// As [`transform_solution_at`], for solutions that may grow at an open end.
///
/// Near a singular end the determinant for a growing solution cancels
/// catastrophically and small errors in the chain members are amplified. At
/// each open end whose quotient shows neither local exponent of the
/// transformed equation, the tail is replaced by integrating
/// `Φ'' = (U1 − ε) Φ` outward from the last point whose condition estimate is
/// below the limit; outward integration is stable for a growing solution.
pub fn transform_solution_guarded(
    chain: &JordanChain,
    psi: &SampledFunction,
    eps: f64,
) -> Result<SampledFunction> {
    psi.check_same_grid(chain.u0())?;
    let wron = chain_wronskian(chain, DEFAULT_TAU_NODE)?;
    let [a, da, dda, bound] = extended_jet(chain, Column::Solution(psi, chain.lambda() - eps));
    let phi = quotient(&a, &da, &dda, &wron, chain)?;
    let u1 = transform_potential(chain, 0.0, &TransformOptions::default())?.u1;
    let coeff: Vec<f64> = u1.values().iter().map(|u| u - eps).collect();
    let n = phi.len();
    let mid = n / 2;
    let condition = |i: usize| {
        if a[i] == 0.0 {
            f64::INFINITY
        } else {
            bound[i] / a[i].abs()
        }
    };
    let (mut val, mut der) = (phi.values().to_vec(), phi.derivs().to_vec());
    for left in [true, false] {
        let shifted = SampledFunction::from_values(u1.grid().clone(), coeff.clone())?;
        let Some((s_plus, s_minus, _)) = frobenius_exponents(&shifted, left) else {
            continue;
        };
        let local = |s: f64| (s - s_plus).abs() < 0.25 || (s - s_minus).abs() < 0.25;
        if singularity_exponent(&phi, left, END_WINDOW).is_ok_and(local) {
            continue;
        }
        let outward: Vec<usize> = if left {
            (0..=mid).rev().collect()
        } else {
            (mid..n).collect()
        };
        let seed = outward
            .iter()
            .take_while(|&&i| condition(i) <= CONDITION_LIMIT)
            .last()
            .copied()
            .unwrap_or(mid);
        let tail = solve_linear_ode2(
            &coeff,
            None,
            u1.grid(),
            phi.value(seed),
            phi.deriv(seed),
            seed,
            &OdeOptions::default(),
        )?;
        let range = if left { 0..seed } else { seed + 1..n };
        for i in range {
            val[i] = tail.value(i);
            der[i] = tail.deriv(i);
        }
    }
    SampledFunction::new(phi.grid().clone(), val, der)?.with_ode(OdeContext {
        coeff: coeff.into(),
        inhom: None,
    })
}

/// `W(u0 … u_{N−2}) / W(u0 … u_{N−1})`, the transformed solution at `ε = λ`.
pub fn missing_state(chain: &JordanChain) -> Result<SampledFunction> {
    let wron = chain_wronskian(chain, DEFAULT_TAU_NODE)?;
    let s = &wron.w_sub;
    let ss = s.second_derivative();
    quotient(s.values(), s.derivs(), &ss, &wron, chain)
}

fn quotient(
    num: &[f64],
    dnum: &[f64],
    ddnum: &[f64],
    wron: &WronskianData,
    chain: &JordanChain,
) -> Result<SampledFunction> {
    if !wron.nodeless_interior {
        return Err(Error::SingularPotential {
            locations: wron.interior_zero_positions(),
        });
    }
    let w = &wron.w;
    let ws = w.second_derivative();
    let n = w.len();
    let mut val = vec![0.0; n];
    let mut der = vec![0.0; n];
    let mut sec = vec![0.0; n];
    for i in 0..n {
        let (q, dq, ddq) = (w.value(i), w.deriv(i), ws[i]);
        let r = num[i] / q;
        val[i] = r;
        der[i] = (dnum[i] - r * dq) / q;
        sec[i] = (ddnum[i] - 2.0 * der[i] * dq - r * ddq) / q;
    }
    SampledFunction::new(chain.u0().grid().clone(), val, der)?.with_exact_second(sec)
}

/// Mixed-norm residual of `ψ'' = (U − ε) ψ` over the interior, using `ψ''`
/// from the function's own second-derivative route.
pub fn schrodinger_residual(psi: &SampledFunction, potential: &SampledFunction, eps: f64) -> f64 {
    let s = psi.second_derivative();
    let n = psi.len();
    let (res, scale): (Vec<f64>, Vec<f64>) = (1..n - 1)
        .map(|i| {
            let rhs = (potential.value(i) - eps) * psi.value(i);
            (
                s[i] - rhs,
                s[i].abs().max(rhs.abs()).max(psi.value(i).abs()),
            )
        })
        .unzip();
    crate::numerics::linalg::mixed_norm(&res, &scale)
}
