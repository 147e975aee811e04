use serde::Serialize;

use super::config::RunConfig;
use super::pipeline::{self, Outcome};
use crate::dirac::{dirac_residual, reduce_to_schrodinger, riccati_residual};
use crate::numerics::{integrate_all, SampledFunction};
use crate::susy_core::{missing_state, schrodinger_residual};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, measured: f64, threshold: f64) -> Check {
        Check {
            name,
            passed: measured < threshold,
            measured,
            threshold,
            detail: String::new(),
        }
    }

    fn with(mut self, detail: String) -> Check {
        self.detail = detail;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub system: String,
    pub passed: bool,
    /// False when the transformation itself is singular; later checks are then skipped.
    pub regular: bool,
    pub checks: Vec<Check>,
}

/// `max_i |a_i| / max(|s_i|, 1e-12 max|s|)`.
fn relative_to(a: &[f64], s: &[f64]) -> f64 {
    let top = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(s)
        .map(|(a, s)| a.abs() / s.abs().max(1e-12 * top))
        .fold(0.0, f64::max)
}

fn dot(a: &SampledFunction, b: &SampledFunction) -> Result<f64> {
    Ok(integrate_all(&a.mul(b)?))
}

fn catalog_checks(cfg: &RunConfig, sys: &crate::catalog::ModelSystem) -> Result<Vec<Check>> {
    let tol = cfg.tolerances;
    let levels = pipeline::levels(cfg);
    let mut checks = Vec::new();

    let u = reduce_to_schrodinger(&sys.potential()?);
    let exact = sys.u0();
    let identity = (0..u.len())
        .map(|i| (u.value(i) - exact.value(i)).abs() / exact.value(i).abs().max(1.0))
        .fold(0.0, f64::max);
    checks.push(Check::below(
        "reduction_identity",
        identity,
        0.1 * tol.tau_ode,
    ));

    let states: Vec<SampledFunction> = (0..levels).map(|n| sys.psi1(n)).collect::<Result<_>>()?;
    let res = states
        .iter()
        .enumerate()
        .map(|(n, p)| schrodinger_residual(p, &exact, sys.epsilon(n)))
        .fold(0.0, f64::max);
    checks.push(Check::below("eigenfunction_residual", res, tol.tau_ode));

    let norms: Vec<f64> = states
        .iter()
        .map(|p| dot(p, p).map(f64::sqrt))
        .collect::<Result<_>>()?;
    let mut overlap: f64 = 0.0;
    for i in 0..levels {
        for j in 0..i {
            overlap = overlap.max(dot(&states[i], &states[j])?.abs() / (norms[i] * norms[j]));
        }
    }
    checks.push(Check::below("orthogonality", overlap, tol.tau_transform));

    let q0 = sys.q0()?;
    let dirac = (0..levels)
        .map(|n| Ok(dirac_residual(&sys.eigenspinor(n)?, &q0)))
        .collect::<Result<Vec<f64>>>()?;
    checks.push(Check::below(
        "eigenspinor_dirac_residual",
        dirac.into_iter().fold(0.0, f64::max),
        10.0 * tol.tau_transform,
    ));

    let w = pipeline::window(cfg, sys, None);
    let rep = pipeline::spectrum(cfg, sys, &exact, w, "U0")?;
    let found = rep.epsilons();
    let expected: Vec<f64> = (0..levels).map(|n| sys.epsilon(n)).collect();
    let dev = if found.len() == expected.len() {
        found
            .iter()
            .zip(&expected)
            .map(|(f, e)| (f - e).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let mut c =
        Check::below("spectrum_oracle", dev, tol.tau_transform).with(format!("found {found:?}"));
    c.passed &= rep.sturm_ordered();
    checks.push(c);
    Ok(checks)
}

fn transform_checks(cfg: &RunConfig, out: &Outcome) -> Result<Vec<Check>> {
    let tol = cfg.tolerances;
    let chain = &out.tr.chain;
    let mut checks = vec![Check::below(
        "chain_residual",
        chain.max_residual(),
        10.0 * tol.tau_ode,
    )];
    if chain.order() == 2 {
        let u0 = chain.u0();
        let w = &out.tr.wron.w;
        let r: Vec<f64> = (0..u0.len())
            .map(|i| w.deriv(i) + u0.value(i).powi(2))
            .collect();
        let s: Vec<f64> = u0.values().iter().map(|v| v * v).collect();
        checks.push(Check::below(
            "wronskian_derivative",
            relative_to(&r, &s),
            tol.tau_transform,
        ));
    }
    if let Some(q1) = &out.q1 {
        checks.push(Check::below(
            "riccati_closure",
            riccati_residual(q1, &out.tr.u1),
            tol.tau_transform,
        ));
    }
    if out.missing_normalizable == Some(true) {
        let ms = missing_state(chain)?;
        let res = schrodinger_residual(&ms, &out.tr.u1, out.lambda + cfg.transform.shift);
        checks.push(Check::below(
            "missing_state_residual",
            res,
            tol.tau_transform,
        ));
    }

    let (before, after, diff) = out.spectra(cfg)?;
    let shift = cfg.transform.shift;
    let lam = out.lambda;
    let near = |a: f64, b: f64| (a - b).abs() <= diff.tol;
    let has_lambda = before.epsilons().iter().any(|e| near(*e, lam));
    let lambda_after = after.epsilons().iter().any(|e| near(*e, lam + shift));
    // λ + C is in the transformed spectrum exactly when the missing state is
    // normalizable; every other level survives shifted by C
    let created = out.missing_normalizable == Some(true);
    let mut wrong = if created == lambda_after { 0 } else { 1 };
    wrong += diff
        .deleted
        .iter()
        .filter(|e| !(near(**e, lam) && !created))
        .count();
    wrong += diff
        .inserted
        .iter()
        .filter(|e| !(near(**e, lam + shift) && created && !has_lambda))
        .count();
    checks.push(Check {
        name: "spectral_bookkeeping",
        passed: wrong == 0,
        measured: wrong as f64,
        threshold: 0.0,
        detail: format!(
            "deleted {:?}; inserted {:?}; retained {}; missing state normalizable: {created}",
            diff.deleted,
            diff.inserted,
            diff.retained.len()
        ),
    });

    let states = out.states(cfg)?;
    let worst = states.iter().map(|s| s.dirac_residual).fold(0.0, f64::max);
    checks.push(
        Check::below(
            "transformed_spinor_dirac_residual",
            worst,
            10.0 * tol.tau_transform,
        )
        .with(format!("{} spinors", states.len())),
    );
    Ok(checks)
}

pub fn verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let sys = pipeline::system(cfg)?;
    let name = sys.name().to_string();
    let mut checks = catalog_checks(cfg, &sys)?;
    let out = pipeline::transform(cfg, sys)?;
    let regular = out.regularity.regular;
    checks.push(Check {
        name: "regularity",
        passed: regular,
        measured: (out.regularity.interior_wronskian_zeros.len() + out.regularity.q_hat_nodes.len())
            as f64,
        threshold: 0.0,
        detail: format!(
            "interior Wronskian zeros {:?}; q̂ nodes {:?}",
            out.regularity.interior_wronskian_zeros, out.regularity.q_hat_nodes
        ),
    });
    if regular {
        checks.extend(transform_checks(cfg, &out)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        system: name,
        passed,
        regular,
        checks,
    })
}
