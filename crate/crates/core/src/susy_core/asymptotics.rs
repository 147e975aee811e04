//! Endpoint behavior: power-law exponents, pole coefficients and
//! square-integrability verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::fit_line;
use crate::numerics::SampledFunction;

pub const DEFAULT_WINDOW: f64 = 0.05;

/// Samples of the outer `window` fraction nearest one end, cut at the first
/// sign change and thinned so that
/// successive distances to the endpoint grow by at least 5%. This weights
/// every scale of a power law alike.
fn window_points(f: &SampledFunction, left: bool, window: f64) -> Result<Vec<(f64, f64)>> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Fit(format!(
            "window fraction {window} not in (0, 1]"
        )));
    }
    let g = f.grid();
    let n = f.len();
    let count = ((window * n as f64).ceil() as usize).clamp(3.min(n), n);
    let mut idx: Vec<usize> = if left {
        (0..count).collect()
    } else {
        (n - count..n).rev().collect()
    };
    // stop short of the first node
    if let Some(k) = idx
        .windows(2)
        .position(|w| f.value(w[0]) * f.value(w[1]) <= 0.0)
    {
        idx.truncate(k + 1);
    }
    if idx.len() < 3 || f.value(idx[0]) == 0.0 {
        return Err(Error::Fit(
            "function changes sign or vanishes next to the endpoint".into(),
        ));
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &i in &idx {
        let d = g.distance_to_end(g.x(i), left);
        if d <= 0.0 {
            continue;
        }
        if out.last().is_none_or(|&(last, _)| d >= 1.05 * last) {
            out.push((d, f.value(i)));
        }
    }
    if out.len() < 3 {
        out = idx
            .iter()
            .map(|&i| (g.distance_to_end(g.x(i), left), f.value(i)))
            .filter(|p| p.0 > 0.0)
            .collect();
    }
    if out.len() < 2 {
        return Err(Error::Fit("too few samples in the fitting window".into()));
    }
    Ok(out)
}

/// Slope of `log|f|` against `log d`, `d` the distance to the chosen endpoint.
pub fn singularity_exponent(f: &SampledFunction, left: bool, window: f64) -> Result<f64> {
    let pts = window_points(f, left, window)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(d, v)| (d.ln(), v.abs().ln())).unzip();
    fit_line(&xs, &ys)
        .map(|(_, s)| s)
        .ok_or_else(|| Error::Fit("degenerate exponent fit".into()))
}

/// Coefficient `k` of the leading `k/d` term, from a line fit of `d·f` against `d`.
pub fn pole_coefficient(f: &SampledFunction, left: bool, window: f64) -> Result<f64> {
    let pts = window_points(f, left, window)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(d, v)| (d, d * v)).unzip();
    fit_line(&xs, &ys)
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Fit("degenerate pole fit".into()))
}

/// Samples used for the endpoint fit of `d²U`.
const FROBENIUS_FIT_POINTS: usize = 8;

/// Local exponents `(s₊, s₋)`, `s(s − 1) = κ`, of `ψ'' = U ψ` at an open end
/// where `d² U ≈ κ + μ d`, together with `μ`. `None` at a closed end.
pub fn frobenius_exponents(u: &SampledFunction, left: bool) -> Option<(f64, f64, f64)> {
    let g = u.grid();
    if !(if left { g.open_left() } else { g.open_right() }) {
        return None;
    }
    let n = u.len();
    let k = FROBENIUS_FIT_POINTS.min(n);
    let idx: Vec<usize> = if left {
        (0..k).collect()
    } else {
        (n - k..n).rev().collect()
    };
    let (ds, ys): (Vec<f64>, Vec<f64>) = idx
        .iter()
        .map(|&i| {
            let d = g.distance_to_end(g.x(i), left);
            (d, d * d * u.value(i))
        })
        .unzip();
    let (kappa, mu) = fit_line(&ds, &ys).unwrap_or((ys[0], 0.0));
    let r = (0.25 + kappa.max(-0.25)).sqrt();
    Some((0.5 + r, 0.5 - r, mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    /// A true endpoint at finite distance.
    Finite,
    /// A truncation of an infinite domain.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndDecay {
    /// `d log|f| / d log d` near a finite end, `d log|f| / d log|x|` near an infinite one.
    pub exponent: f64,
    pub square_integrable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalizability {
    pub left: EndDecay,
    pub right: EndDecay,
    pub normalizable: bool,
}

/// Margin on the critical exponents (−1/2 at a finite end, −1/2 at infinity)
/// that a fit must clear to count as square-integrable.
const EXPONENT_MARGIN: f64 = 0.1;

/// Decay exponent and square-integrability verdict at one end.
pub fn end_decay(f: &SampledFunction, left: bool, kind: EndKind) -> Result<EndDecay> {
    match kind {
        EndKind::Finite => {
            let s = singularity_exponent(f, left, DEFAULT_WINDOW)?;
            Ok(EndDecay {
                exponent: s,
                square_integrable: s > -0.5 + EXPONENT_MARGIN,
            })
        }
        EndKind::Infinite => {
            let g = f.grid();
            let n = f.len();
            let count = ((DEFAULT_WINDOW * n as f64).ceil() as usize).clamp(2, n);
            let idx: Vec<usize> = if left {
                (0..count).collect()
            } else {
                (n - count..n).collect()
            };
            let pts: Vec<(f64, f64)> = idx
                .iter()
                .filter(|&&i| f.value(i) != 0.0 && g.x(i) != 0.0)
                .map(|&i| (g.x(i).abs().ln(), f.value(i).abs().ln()))
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let s = if xs.len() < 2 {
                // vanished to underflow
                f64::NEG_INFINITY
            } else {
                fit_line(&xs, &ys)
                    .map(|(_, s)| s)
                    .ok_or_else(|| Error::Fit("degenerate decay fit".into()))?
            };
            Ok(EndDecay {
                exponent: s,
                square_integrable: s < -0.5 - EXPONENT_MARGIN,
            })
        }
    }
}

/// Square-integrability verdict from the decay at both ends.
pub fn normalizability(
    f: &SampledFunction,
    left: EndKind,
    right: EndKind,
) -> Result<Normalizability> {
    let l = end_decay(f, true, left)?;
    let r = end_decay(f, false, right)?;
    Ok(Normalizability {
        left: l,
        right: r,
        normalizable: l.square_integrable && r.square_integrable,
    })
}
