//! Dirac equations `iσ₂Ψ' + (mσ₃ + qσ₁ − E)Ψ = 0` with pseudoscalar
//! potentials, their Schrödinger reduction `U = q² + q'`, `ε = E² − m²`, and
//! the Riccati route back from a transformed `U1` to `q1`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    antiderivative, fd_derivative, integrate_all, solve_linear_ode2, Anchor, Grid, OdeOptions,
    SampledFunction,
};
use crate::susy_core::asymptotics::{normalizability, EndKind, Normalizability};

#[derive(Debug, Clone)]
pub struct PseudoscalarPotential {
    m: f64,
    q: SampledFunction,
    label: String,
}

impl PseudoscalarPotential {
    pub fn new(m: f64, q: SampledFunction, label: impl Into<String>) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mass must be positive, got {m}"
            )));
        }
        if let Some(i) = q.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoefficient { x: q.grid().x(i) });
        }
        Ok(PseudoscalarPotential {
            m,
            q,
            label: label.into(),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn q(&self) -> &SampledFunction {
        &self.q
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `U = q² + q'`. `U'` uses `q''` when `q` carries it, finite differences otherwise.
pub fn reduce_to_schrodinger(v: &PseudoscalarPotential) -> SampledFunction {
    schrodinger_potential(&v.q)
}

pub(crate) fn schrodinger_potential(q: &SampledFunction) -> SampledFunction {
    let n = q.len();
    let vals: Vec<f64> = (0..n)
        .map(|i| q.value(i) * q.value(i) + q.deriv(i))
        .collect();
    let der = if q.has_exact_second() {
        let qpp = q.second_derivative();
        (0..n)
            .map(|i| 2.0 * q.value(i) * q.deriv(i) + qpp[i])
            .collect()
    } else {
        fd_derivative(&vals, q.grid().step(), 1).expect("grid holds at least the stencil width")
    };
    SampledFunction::new(q.grid().clone(), vals, der).expect("lengths match the grid")
}

/// `±√(ε + C + m²)`.
pub fn energy_map(epsilon: f64, c: f64, m: f64) -> Result<(f64, f64)> {
    let r = epsilon + c + m * m;
    if r < 0.0 {
        return Err(Error::NoRealEnergy(r));
    }
    let e = r.sqrt();
    Ok((e, -e))
}

/// Solution of `q̂'' = U1 q̂` with `q̂ = value`, `q̂' = slope` at `anchor`.
pub fn zero_energy_solution(
    u1: &SampledFunction,
    ic: (f64, f64, usize),
) -> Result<SampledFunction> {
    let (value, slope, anchor) = ic;
    solve_linear_ode2(
        u1.values(),
        None,
        u1.grid(),
        value,
        slope,
        anchor,
        &OdeOptions::default(),
    )
}

fn check_nodeless(q_hat: &SampledFunction) -> Result<()> {
    let bad: Vec<f64> = q_hat
        .sign_changes()
        .iter()
        .map(|&i| q_hat.grid().x(i))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::SingularQ { locations: bad })
    }
}

/// `q = (log q̂)'`, with `q' = q̂''/q̂ − q²` so that `q² + q' = q̂''/q̂` holds exactly.
pub fn riccati_particular(q_hat: &SampledFunction) -> Result<SampledFunction> {
    check_nodeless(q_hat)?;
    let s = q_hat.second_derivative();
    let n = q_hat.len();
    let q: Vec<f64> = (0..n).map(|i| q_hat.deriv(i) / q_hat.value(i)).collect();
    let dq: Vec<f64> = (0..n)
        .map(|i| s[i] / q_hat.value(i) - q[i] * q[i])
        .collect();
    SampledFunction::new(q_hat.grid().clone(), q, dq)
}

/// Range of the family parameter: `c + I(x)` keeps one sign on the grid for
/// `c > above` or `c < below`, where `I = ∫_anchor 1/q̂²` is increasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleC {
    pub above: f64,
    pub below: f64,
}

impl std::fmt::Display for AdmissibleC {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "c > {} or c < {}", self.above, self.below)
    }
}

fn inverse_square_integral(q_hat: &SampledFunction, anchor: Anchor) -> Result<SampledFunction> {
    let n = q_hat.len();
    let inv = SampledFunction::new(
        q_hat.grid().clone(),
        q_hat.values().iter().map(|v| 1.0 / (v * v)).collect(),
        (0..n)
            .map(|i| -2.0 * q_hat.deriv(i) / q_hat.value(i).powi(3))
            .collect(),
    )?;
    antiderivative(&inv, anchor, 0.0)
}

pub fn admissible_c(q_hat: &SampledFunction, anchor: Anchor) -> Result<AdmissibleC> {
    check_nodeless(q_hat)?;
    let i = inverse_square_integral(q_hat, anchor)?;
    let n = i.len();
    Ok(AdmissibleC {
        above: -i.value(0),
        below: -i.value(n - 1),
    })
}

/// `q = (log q̂)' + 1/D`, `D = q̂² (c + ∫_anchor 1/q̂²)`.
pub fn riccati_family(q_hat: &SampledFunction, c: f64, anchor: Anchor) -> Result<SampledFunction> {
    let qp = riccati_particular(q_hat)?;
    let big_i = inverse_square_integral(q_hat, anchor)?;
    let n = q_hat.len();
    let shifted: Vec<f64> = big_i.values().iter().map(|v| c + v).collect();
    if let Some(k) =
        (0..n).find(|&k| shifted[k] == 0.0 || (k + 1 < n && shifted[k] * shifted[k + 1] < 0.0))
    {
        let adm = AdmissibleC {
            above: -big_i.value(0),
            below: -big_i.value(n - 1),
        };
        return Err(Error::FamilySingularity {
            x: q_hat.grid().x(k),
            admissible: adm.to_string(),
        });
    }
    let mut q = vec![0.0; n];
    let mut dq = vec![0.0; n];
    for k in 0..n {
        let (h, dh) = (q_hat.value(k), q_hat.deriv(k));
        let d = h * h * shifted[k];
        let dd = 2.0 * h * dh * shifted[k] + 1.0;
        q[k] = qp.value(k) + 1.0 / d;
        dq[k] = qp.deriv(k) - dd / (d * d);
    }
    SampledFunction::new(q_hat.grid().clone(), q, dq)
}

/// Zero-energy solution, particular Riccati solution and optionally one family member.
#[derive(Debug, Clone)]
pub struct RiccatiFamily {
    pub q_hat: SampledFunction,
    pub q_particular: SampledFunction,
    pub c: Option<f64>,
    pub q_general: Option<SampledFunction>,
}

impl RiccatiFamily {
    pub fn new(q_hat: SampledFunction, c: Option<f64>, anchor: Anchor) -> Result<Self> {
        let q_particular = riccati_particular(&q_hat)?;
        let q_general = c.map(|c| riccati_family(&q_hat, c, anchor)).transpose()?;
        Ok(RiccatiFamily {
            q_hat,
            q_particular,
            c,
            q_general,
        })
    }

    /// The general member when present, the particular solution otherwise.
    pub fn q(&self) -> &SampledFunction {
        self.q_general.as_ref().unwrap_or(&self.q_particular)
    }
}

/// Max-norm of `q² + q' − U` over the interior points.
pub fn riccati_residual(q: &SampledFunction, u: &SampledFunction) -> f64 {
    let n = q.len();
    (1..n - 1)
        .map(|i| (q.value(i) * q.value(i) + q.deriv(i) - u.value(i)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct Spinor {
    pub e: f64,
    pub psi1: SampledFunction,
    pub psi2: SampledFunction,
    pub m: f64,
}

impl Spinor {
    pub fn new(e: f64, psi1: SampledFunction, psi2: SampledFunction, m: f64) -> Result<Self> {
        if e == -m {
            return Err(Error::EnergyAtMinusMass);
        }
        psi1.check_same_grid(&psi2)?;
        Ok(Spinor { e, psi1, psi2, m })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.psi1.grid()
    }

    /// `|Ψ1|² + |Ψ2|²` pointwise.
    pub fn density(&self) -> Vec<f64> {
        (0..self.psi1.len())
            .map(|i| self.psi1.value(i).powi(2) + self.psi2.value(i).powi(2))
            .collect()
    }

    pub fn scale(&self, c: f64) -> Spinor {
        Spinor {
            e: self.e,
            psi1: self.psi1.scale(c),
            psi2: self.psi2.scale(c),
            m: self.m,
        }
    }
}

/// `Φ2 = (q Φ1 − Φ1')/(E + m)`.
pub fn assemble_spinor(
    q: &SampledFunction,
    phi1: &SampledFunction,
    e: f64,
    m: f64,
) -> Result<Spinor> {
    if e == -m {
        return Err(Error::EnergyAtMinusMass);
    }
    q.check_same_grid(phi1)?;
    let n = phi1.len();
    let s = phi1.second_derivative();
    let k = 1.0 / (e + m);
    let val = (0..n)
        .map(|i| k * (q.value(i) * phi1.value(i) - phi1.deriv(i)))
        .collect();
    let der = (0..n)
        .map(|i| k * (q.deriv(i) * phi1.value(i) + q.value(i) * phi1.deriv(i) - s[i]))
        .collect();
    let psi2 = SampledFunction::new(phi1.grid().clone(), val, der)?;
    Spinor::new(e, phi1.clone(), psi2, m)
}

/// Pointwise `|Ψ1' − qΨ1 + (E+m)Ψ2| + |Ψ2' + qΨ2 − (E−m)Ψ1|`.
pub fn dirac_residuals(s: &Spinor, q: &SampledFunction) -> Vec<f64> {
    let (p1, p2) = (&s.psi1, &s.psi2);
    (0..p1.len())
        .map(|i| {
            let a = p1.deriv(i) - q.value(i) * p1.value(i) + (s.e + s.m) * p2.value(i);
            let b = p2.deriv(i) + q.value(i) * p2.value(i) - (s.e - s.m) * p1.value(i);
            a.abs() + b.abs()
        })
        .collect()
}

/// Largest [`dirac_residuals`] entry over the interior points.
pub fn dirac_residual(s: &Spinor, q: &SampledFunction) -> f64 {
    let r = dirac_residuals(s, q);
    r[1..r.len() - 1].iter().fold(0.0, |m, v| m.max(*v))
}

/// `∫ |Ψ1|² + |Ψ2|²` over the grid.
pub fn spinor_norm(s: &Spinor) -> f64 {
    let d = s
        .psi1
        .mul(&s.psi1)
        .and_then(|a| a.add(&s.psi2.mul(&s.psi2)?))
        .expect("components share a grid");
    integrate_all(&d)
}

/// Decay verdict for the density's square root at both ends.
pub fn spinor_normalizability(
    s: &Spinor,
    left: EndKind,
    right: EndKind,
) -> Result<Normalizability> {
    let amp: Vec<f64> = s.density().iter().map(|d| d.sqrt()).collect();
    let f = SampledFunction::from_values(s.grid().clone(), amp)?;
    normalizability(&f, left, right)
}
