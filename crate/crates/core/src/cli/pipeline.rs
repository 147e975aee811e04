use serde::Serialize;

use super::config::{RunConfig, DEFAULT_OSCILLATOR_LAMBDA};
use crate::catalog::{
    coulomb_chain, coulomb_grid, oscillator_insertion_setup, transformed_generator, trig_chain,
    ModelSystem, SystemParams, TRIG_INNER_CONSTANT,
};
use crate::dirac::{
    assemble_spinor, dirac_residual, energy_map, riccati_family, riccati_particular,
    zero_energy_solution, Spinor,
};
use crate::numerics::{integrate_all, Anchor, OdeContext, SampledFunction};
use crate::spectral::{
    compare_spectra, regularity_report, shoot_spectrum, DiffReport, RegularityReport, ShootOptions,
    SpectrumReport,
};
use crate::susy_core::{
    missing_state, normalizability, partner_solution_v0, transform_potential,
    transform_solution_at, JordanChain, TransformOptions, TransformResult,
};
use crate::Result;

pub fn system(cfg: &RunConfig) -> Result<ModelSystem> {
    let sys = ModelSystem::from_params(&cfg.system, cfg.m)?;
    match (&cfg.grid, &cfg.system, cfg.levels) {
        (Some(spec), _, _) => sys.with_grid(spec.build()?),
        (None, SystemParams::Coulomb { ell }, Some(levels)) => {
            sys.with_grid(coulomb_grid(*ell, levels - 1)?)
        }
        _ => Ok(sys),
    }
}

pub fn levels(cfg: &RunConfig) -> usize {
    cfg.levels.unwrap_or(match cfg.system {
        SystemParams::Coulomb { .. } => crate::catalog::COULOMB_DEFAULT_LEVELS + 1,
        SystemParams::Oscillator { .. } => 6,
        SystemParams::Trig => 3,
    })
}

/// Factorization energy of the configured transformation.
pub fn lambda(cfg: &RunConfig, sys: &ModelSystem) -> f64 {
    match cfg.system {
        SystemParams::Coulomb { .. } => sys.epsilon(cfg.transform.n0),
        SystemParams::Oscillator { .. } => {
            cfg.transform.lambda.unwrap_or(DEFAULT_OSCILLATOR_LAMBDA)
        }
        SystemParams::Trig => sys.epsilon(0),
    }
}

/// Covers the first `levels` closed-form values and `λ`, with half a level
/// spacing to spare at each end.
pub fn window(cfg: &RunConfig, sys: &ModelSystem, lambda: Option<f64>) -> (f64, f64) {
    if let Some(w) = cfg.window {
        return w;
    }
    let k = levels(cfg);
    let below = 0.5 * (sys.epsilon(1) - sys.epsilon(0));
    let above = 0.5 * (sys.epsilon(k) - sys.epsilon(k - 1));
    let (lo, hi) = (sys.epsilon(0) - below, sys.epsilon(k - 1) + above);
    match lambda {
        Some(l) if l < lo => (l - below, hi),
        Some(l) if l > hi => (lo, l + above),
        _ => (lo, hi),
    }
}

pub fn spectrum(
    cfg: &RunConfig,
    sys: &ModelSystem,
    u: &SampledFunction,
    window: (f64, f64),
    label: &str,
) -> Result<SpectrumReport> {
    let (left_end, right_end) = sys.ends();
    let opts = ShootOptions {
        tolerance: cfg.tolerances.tau_shoot,
        left_end,
        right_end,
        m: Some(sys.m()),
        label: label.into(),
        ..Default::default()
    };
    shoot_spectrum(u, window, &opts)
}

/// `u0` carrying its ODE at `λ`, so that second derivatives and the partner
/// solution follow from it.
fn with_ode(u0: &SampledFunction, sys: &ModelSystem, lambda: f64) -> Result<SampledFunction> {
    let coeff: Vec<f64> = sys.u0().values().iter().map(|u| u - lambda).collect();
    u0.clone().without_second().with_ode(OdeContext {
        coeff: coeff.into(),
        inhom: None,
    })
}

fn u_hat(
    cfg: &RunConfig,
    sys: &ModelSystem,
    u0: &SampledFunction,
    lambda: f64,
) -> Result<Option<SampledFunction>> {
    if cfg.transform.u_hat == 0.0 {
        return Ok(None);
    }
    let u0 = with_ode(u0, sys, lambda)?;
    let peak = (0..u0.len())
        .max_by(|&i, &j| u0.value(i).abs().total_cmp(&u0.value(j).abs()))
        .unwrap_or(0);
    Ok(Some(
        partner_solution_v0(&u0, Anchor::Index(peak))?.scale(cfg.transform.u_hat),
    ))
}

pub fn chain(cfg: &RunConfig, sys: &ModelSystem) -> Result<JordanChain> {
    let t = &cfg.transform;
    let lambda = lambda(cfg, sys);
    match cfg.system {
        SystemParams::Coulomb { .. } => {
            let extra = u_hat(cfg, sys, &sys.psi1(t.n0)?, lambda)?;
            coulomb_chain(sys, t.n0, t.w0, extra.as_ref())
        }
        SystemParams::Oscillator { .. } => oscillator_insertion_setup(sys, lambda, t.b),
        SystemParams::Trig => {
            let extra = u_hat(cfg, sys, &sys.psi1(0)?, lambda)?;
            let inner = t
                .inner_constants
                .clone()
                .unwrap_or_else(|| vec![0.0, TRIG_INNER_CONSTANT]);
            trig_chain(sys, &inner, extra.as_ref())
        }
    }
}

/// A transformed bound state: `level` indexes the untransformed spectrum, and
/// is `None` for the state created at `λ`.
pub struct TransformedState {
    pub level: Option<usize>,
    pub epsilon: f64,
    pub spinor: Spinor,
    pub dirac_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinorSummary {
    pub level: Option<usize>,
    pub epsilon: f64,
    pub energy: f64,
    pub dirac_residual: f64,
}

impl TransformedState {
    pub fn summary(&self) -> SpinorSummary {
        SpinorSummary {
            level: self.level,
            epsilon: self.epsilon,
            energy: self.spinor.e,
            dirac_residual: self.dirac_residual,
        }
    }
}

/// Everything a regular transformation produces.
pub struct Outcome {
    pub sys: ModelSystem,
    pub lambda: f64,
    pub tr: TransformResult,
    pub regularity: RegularityReport,
    pub q1: Option<SampledFunction>,
    pub missing_normalizable: Option<bool>,
}

pub fn transform(cfg: &RunConfig, sys: ModelSystem) -> Result<Outcome> {
    let lambda = lambda(cfg, &sys);
    let chain = chain(cfg, &sys)?;
    let opts = TransformOptions {
        tau_node: cfg.tolerances.tau_node,
        allow_singular: true,
    };
    let tr = transform_potential(&chain, cfg.transform.shift, &opts)?;
    let eps0 = (chain.order() == 3).then(|| sys.epsilon(0));
    // the closed-form generator is a zero-energy solution of U1 only when C = 0;
    // otherwise q̂ is integrated from the left end, vanishing one step beyond it
    let q_hat = match (tr.wron.nodeless_interior, cfg.transform.shift == 0.0) {
        (false, _) => None,
        (true, true) => Some(transformed_generator(&sys, &chain)?),
        (true, false) => Some(zero_energy_solution(&tr.u1, (sys.grid().step(), 1.0, 0))?),
    };
    let regularity = regularity_report(&tr, q_hat.as_ref(), sys.ends(), eps0)?;
    let q1 = match (&q_hat, regularity.regular, cfg.transform.c) {
        (Some(q), true, None) => Some(riccati_particular(q)?),
        (Some(q), true, Some(c)) => Some(riccati_family(q, c, Anchor::Midpoint)?),
        _ => None,
    };
    let missing_normalizable = if tr.wron.nodeless_interior {
        let (l, r) = sys.ends();
        Some(normalizability(&missing_state(&chain)?, l, r)?.normalizable)
    } else {
        None
    };
    Ok(Outcome {
        sys,
        lambda,
        tr,
        regularity,
        q1,
        missing_normalizable,
    })
}

fn l2(f: &SampledFunction) -> Result<f64> {
    Ok(integrate_all(&f.mul(f)?).sqrt())
}

impl Outcome {
    /// Transformed spinors for the first `levels` states, plus the state at
    /// `λ` when the missing state is normalizable. Upper components have unit
    /// `L²` norm.
    pub fn states(&self, cfg: &RunConfig) -> Result<Vec<TransformedState>> {
        let Some(q1) = &self.q1 else {
            return Ok(Vec::new());
        };
        let shift = cfg.transform.shift;
        let chain = &self.tr.chain;
        let mut out = Vec::new();
        let mut push = |level: Option<usize>, eps: f64, phi: SampledFunction| -> Result<()> {
            let phi = phi.scale(1.0 / l2(&phi)?);
            let e = energy_map(eps, shift, self.sys.m())?.0;
            let spinor = assemble_spinor(q1, &phi, e, self.sys.m())?;
            let dirac_residual = dirac_residual(&spinor, q1);
            out.push(TransformedState {
                level,
                epsilon: eps + shift,
                spinor,
                dirac_residual,
            });
            Ok(())
        };
        for n in 0..levels(cfg) {
            let eps = self.sys.epsilon(n);
            if (eps - self.lambda).abs() <= 1e-12 * eps.abs().max(1.0) {
                continue;
            }
            push(
                Some(n),
                eps,
                transform_solution_at(chain, &self.sys.psi1(n)?, eps)?,
            )?;
        }
        if self.missing_normalizable == Some(true) {
            push(None, self.lambda, missing_state(chain)?)?;
        }
        out.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
        Ok(out)
    }

    pub fn spectra(&self, cfg: &RunConfig) -> Result<(SpectrumReport, SpectrumReport, DiffReport)> {
        let w = window(cfg, &self.sys, Some(self.lambda));
        let shift = cfg.transform.shift;
        let before = spectrum(cfg, &self.sys, &self.sys.u0(), w, "U0")?;
        let after = spectrum(
            cfg,
            &self.sys,
            &self.tr.u1,
            (w.0 + shift, w.1 + shift),
            "U1",
        )?;
        let diff = compare_spectra(&before, &after, shift, 100.0 * cfg.tolerances.tau_transform);
        Ok((before, after, diff))
    }
}
