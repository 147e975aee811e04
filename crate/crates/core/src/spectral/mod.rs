//! Independent spectral checks: a shooting eigensolver, before/after spectrum
//! comparison and regularity reports for transformations.

mod regularity;
mod shoot;

use serde::{Deserialize, Serialize};

pub use regularity::{regularity_report, AdmissibleRange, IntegralBound, RegularityReport};
pub use shoot::BoundaryCondition;

use crate::dirac::energy_map;
use crate::error::{Error, Result};
use crate::numerics::SampledFunction;
use crate::susy_core::{normalizability, EndKind};
use shoot::{Shooter, Trial};

pub const DEFAULT_TAU_SHOOT: f64 = 1e-8;
pub const DEFAULT_SCAN_STEPS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootOptions {
    pub bc: BoundaryCondition,
    pub max_states: usize,
    /// Bracket width at which refinement stops.
    pub tolerance: f64,
    pub scan_steps: usize,
    pub left_end: EndKind,
    pub right_end: EndKind,
    /// Mass for the derived Dirac energies; none are listed without it.
    pub m: Option<f64>,
    pub label: String,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            bc: BoundaryCondition::Dirichlet,
            max_states: 16,
            tolerance: DEFAULT_TAU_SHOOT,
            scan_steps: DEFAULT_SCAN_STEPS,
            left_end: EndKind::Finite,
            right_end: EndKind::Finite,
            m: None,
            label: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub epsilon: f64,
    pub node_count: usize,
    pub normalizable: bool,
    /// Scaled Wronskian of the two shooting solutions at `epsilon`.
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub potential_label: String,
    pub eigenvalues: Vec<Eigenvalue>,
    pub search_window: (f64, f64),
    /// `(+E, −E)` for each eigenvalue.
    pub dirac_energies: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    pub fn epsilons(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.epsilon).collect()
    }

    /// Node counts run 0, 1, 2, … without gaps.
    pub fn sturm_ordered(&self) -> bool {
        self.eigenvalues
            .iter()
            .enumerate()
            .all(|(k, e)| e.node_count == k)
    }
}

/// Illinois-modified regula falsi on a sign-changing bracket, with the
/// meeting point frozen so the mismatch is continuous in `ε`.
fn refine(sh: &Shooter, mut a: Trial, mut b: Trial, tol: f64) -> Trial {
    let meet = Some(a.meet);
    let (mut fa, mut fb) = (
        sh.trial(a.eps, meet).mismatch,
        sh.trial(b.eps, meet).mismatch,
    );
    if fa * fb > 0.0 {
        // frozen meeting point changed the picture; fall back to bisection on the scan values
        fa = a.mismatch;
        fb = b.mismatch;
    }
    let mut side = 0;
    for _ in 0..200 {
        if (b.eps - a.eps).abs() <= tol {
            break;
        }
        let mut x = if fa != fb {
            b.eps - fb * (b.eps - a.eps) / (fb - fa)
        } else {
            0.5 * (a.eps + b.eps)
        };
        let (lo, hi) = (a.eps.min(b.eps), a.eps.max(b.eps));
        let margin = 0.01 * (hi - lo);
        if !(x > lo + margin && x < hi - margin) {
            x = 0.5 * (lo + hi);
        }
        let t = sh.trial(x, meet);
        let ft = t.mismatch;
        if ft == 0.0 {
            return t;
        }
        if ft * fb < 0.0 {
            a = b;
            fa = fb;
            b = t;
            fb = ft;
            side = 0;
        } else {
            b = t;
            fb = ft;
            side += 1;
            if side >= 2 {
                fa *= 0.5;
            }
        }
    }
    let (ta, tb) = (sh.trial(a.eps, meet), sh.trial(b.eps, meet));
    if ta.mismatch.abs() <= tb.mismatch.abs() {
        ta
    } else {
        tb
    }
}

fn scan(sh: &Shooter, lo: f64, hi: f64, steps: usize, tol: f64) -> Vec<Trial> {
    let trials: Vec<Trial> = (0..=steps)
        .map(|k| sh.trial(lo + (hi - lo) * k as f64 / steps as f64, None))
        .collect();
    let mut roots = Vec::new();
    let mut iter = trials.into_iter().peekable();
    while let Some(a) = iter.next() {
        if a.mismatch == 0.0 {
            roots.push(a);
            continue;
        }
        if let Some(b) = iter.peek() {
            if a.mismatch * b.mismatch < 0.0 {
                let b = sh.trial(b.eps, None);
                roots.push(refine(sh, a, b, tol));
            }
        }
    }
    roots
}

/// Eigenvalues of `−ψ'' + U ψ = ε ψ` in `window`, lowest first, at most
/// `max_states` of them.
pub fn shoot_spectrum(
    u: &SampledFunction,
    window: (f64, f64),
    opts: &ShootOptions,
) -> Result<SpectrumReport> {
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "empty search window ({lo}, {hi})"
        )));
    }
    if opts.scan_steps == 0 || !(opts.tolerance > 0.0) {
        return Err(Error::InvalidArgument(
            "scan steps and tolerance must be positive".into(),
        ));
    }
    let sh = Shooter::new(u)?;
    let mut warnings = Vec::new();
    let mut roots = scan(&sh, lo, hi, opts.scan_steps, opts.tolerance);
    let nodes = |r: &[Trial]| r.iter().map(|t| t.nodes()).collect::<Vec<_>>();
    // a gap in the node counts means two roots shared a scan cell
    let counts = nodes(&roots);
    let first = counts.first().copied().unwrap_or(0);
    if counts.iter().enumerate().any(|(k, c)| *c != first + k) {
        let finer = scan(&sh, lo, hi, opts.scan_steps * 16, opts.tolerance);
        if finer.len() > roots.len() {
            roots = finer;
        }
    }
    roots.truncate(opts.max_states);
    let mut eigenvalues = Vec::new();
    let mut dirac_energies = Vec::new();
    for t in &roots {
        let state = t.state(&sh)?;
        let normalizable = match normalizability(&state, opts.left_end, opts.right_end) {
            Ok(v) => v.normalizable,
            Err(e) => {
                warnings.push(format!("normalizability at ε = {}: {e}", t.eps));
                false
            }
        };
        eigenvalues.push(Eigenvalue {
            epsilon: t.eps,
            node_count: t.nodes(),
            normalizable,
            mismatch: t.mismatch,
        });
        if let Some(m) = opts.m {
            match energy_map(t.eps, 0.0, m) {
                Ok(e) => dirac_energies.push(e),
                Err(e) => warnings.push(format!("ε = {}: {e}", t.eps)),
            }
        }
    }
    let mut report = SpectrumReport {
        potential_label: opts.label.clone(),
        eigenvalues,
        search_window: window,
        dirac_energies,
        warnings,
    };
    if !report.sturm_ordered() {
        report
            .warnings
            .push("node counts are not consecutive from 0".into());
    }
    Ok(report)
}

/// The shooting solution at `eps`, stitched at the meeting point, unit `L²`
/// norm. At an eigenvalue this is the eigenfunction.
pub fn shoot_state(u: &SampledFunction, eps: f64) -> Result<SampledFunction> {
    let sh = Shooter::new(u)?;
    sh.trial(eps, None).state(&sh)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Retained {
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub c: f64,
    pub tol: f64,
    pub retained: Vec<Retained>,
    pub deleted: Vec<f64>,
    pub inserted: Vec<f64>,
}

/// Matches each `before + C` to the nearest unused `after` value within `tol`.
pub fn compare_spectra(
    before: &SpectrumReport,
    after: &SpectrumReport,
    c: f64,
    tol: f64,
) -> DiffReport {
    let after_eps = after.epsilons();
    let mut used = vec![false; after_eps.len()];
    let mut retained = Vec::new();
    let mut deleted = Vec::new();
    for b in before.epsilons() {
        let target = b + c;
        let best = (0..after_eps.len()).filter(|&k| !used[k]).min_by(|&x, &y| {
            (after_eps[x] - target)
                .abs()
                .total_cmp(&(after_eps[y] - target).abs())
        });
        match best {
            Some(k) if (after_eps[k] - target).abs() <= tol => {
                used[k] = true;
                retained.push(Retained {
                    before: b,
                    after: after_eps[k],
                });
            }
            _ => deleted.push(b),
        }
    }
    let inserted = after_eps
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(e, _)| *e)
        .collect();
    DiffReport {
        c,
        tol,
        retained,
        deleted,
        inserted,
    }
}
