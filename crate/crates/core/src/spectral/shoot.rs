//! Two-sided Numerov shooting for `−ψ'' + U ψ = ε ψ` with Dirichlet limits.
//!
//! Closed grid ends start from `ψ = 0`. Open ends start from the local
//! Frobenius form `d^s (1 + b d)` with `s(s − 1) = κ`, `b = μ / 2s`, where
//! `d²U ≈ κ + μ d` is fitted on the first samples; the start moves inward
//! until the Numerov step is resolved. Both solutions meet at the outermost
//! classical turning point, and the eigenvalue condition is the sign change of
//! their Wronskian, which is independent of the meeting point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::recover_derivative;
use crate::numerics::{integrate_all, OdeContext, SampledFunction};
use crate::susy_core::frobenius_exponents;

/// `h²|U − ε|/12` below which a Numerov step counts as resolved.
const RESOLVED: f64 = 0.05;
const RESCALE_AT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    #[default]
    Dirichlet,
}

#[derive(Debug, Clone, Copy)]
struct EndStart {
    s: f64,
    b: f64,
}

/// Frobenius data at an open end, `None` at a closed one.
fn end_start(u: &SampledFunction, left: bool) -> Option<EndStart> {
    frobenius_exponents(u, left).map(|(s, _, mu)| EndStart {
        s,
        b: mu / (2.0 * s),
    })
}

/// Per-potential data shared by every trial energy.
pub(crate) struct Shooter<'a> {
    u: &'a SampledFunction,
    left: Option<EndStart>,
    right: Option<EndStart>,
    h2: f64,
}

pub(crate) struct Trial {
    pub eps: f64,
    /// Wronskian of the two solutions at the meeting point, scaled to `[−1, 1]`.
    pub mismatch: f64,
    pub meet: usize,
    left: Vec<f64>,
    right: Vec<f64>,
    left_start: usize,
    right_start: usize,
}

impl<'a> Shooter<'a> {
    pub fn new(u: &'a SampledFunction) -> Result<Self> {
        if let Some(i) = u.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoefficient { x: u.grid().x(i) });
        }
        let h = u.grid().step();
        Ok(Shooter {
            u,
            left: end_start(u, true),
            right: end_start(u, false),
            h2: h * h,
        })
    }

    fn k(&self, i: usize, eps: f64) -> f64 {
        self.u.value(i) - eps
    }

    fn resolved(&self, i: usize, eps: f64) -> bool {
        self.h2 * self.k(i, eps).abs() / 12.0 < RESOLVED
    }

    /// First index, counted from one end, from which Numerov steps are resolved.
    fn start_index(&self, left: bool, eps: f64) -> usize {
        let n = self.u.len();
        let at = |j: usize| if left { j } else { n - 1 - j };
        let mut j = 0;
        while j + 2 < n / 2 && !(self.resolved(at(j), eps) && self.resolved(at(j + 1), eps)) {
            j += 1;
        }
        j
    }

    fn start_value(&self, i: usize, left: bool, start: Option<EndStart>) -> f64 {
        let g = self.u.grid();
        match start {
            Some(e) => {
                let d = g.distance_to_end(g.x(i), left);
                d.powf(e.s) * (1.0 + e.b * d)
            }
            None => {
                let n = self.u.len();
                let j = if left { i } else { n - 1 - i };
                j as f64 * g.step()
            }
        }
    }

    /// Integrates from one end to `stop` (inclusive), one step past the meeting point.
    fn integrate(&self, left: bool, eps: f64, stop: usize) -> (Vec<f64>, usize) {
        let n = self.u.len();
        let start = if left { self.left } else { self.right };
        let j0 = if start.is_some() {
            self.start_index(left, eps)
        } else {
            0
        };
        let at = |j: usize| if left { j } else { n - 1 - j };
        let last = if left { stop } else { n - 1 - stop };
        let mut y = vec![0.0; n];
        for j in 0..=(j0 + 1).min(last) {
            y[at(j)] = self.start_value(at(j), left, start);
        }
        let alpha = |i: usize| 1.0 - self.h2 * self.k(i, eps) / 12.0;
        for j in j0 + 1..last {
            let (p, c, nx) = (at(j - 1), at(j), at(j + 1));
            let v = (2.0 * y[c] * (1.0 + 5.0 * self.h2 * self.k(c, eps) / 12.0) - y[p] * alpha(p))
                / alpha(nx);
            y[nx] = v;
            if v.abs() > RESCALE_AT {
                for jj in 0..=j + 1 {
                    y[at(jj)] /= RESCALE_AT;
                }
            }
        }
        (y, at(j0))
    }

    /// Outermost classically allowed index, kept clear of both starts.
    fn meeting_point(&self, eps: f64) -> usize {
        let n = self.u.len();
        let lo = self.start_index(true, eps).max(1) + 2;
        let hi = (n - 1 - self.start_index(false, eps).max(1)).saturating_sub(2);
        let turning = (0..n)
            .rev()
            .find(|&i| self.k(i, eps) < 0.0)
            .unwrap_or_else(|| {
                (0..n)
                    .min_by(|&a, &b| self.u.value(a).total_cmp(&self.u.value(b)))
                    .unwrap_or(n / 2)
            });
        if lo >= hi {
            n / 2
        } else {
            turning.clamp(lo, hi)
        }
    }

    pub fn trial(&self, eps: f64, meet: Option<usize>) -> Trial {
        let m = meet.unwrap_or_else(|| self.meeting_point(eps));
        let (left, left_start) = self.integrate(true, eps, m + 1);
        let (right, right_start) = self.integrate(false, eps, m - 1);
        let h = self.u.grid().step();
        let der = |y: &[f64]| -> f64 {
            let ypp = |i: usize| self.k(i, eps) * y[i];
            (y[m + 1] - y[m - 1]) / (2.0 * h) - h / 12.0 * (ypp(m + 1) - ypp(m - 1))
        };
        let (yl, dl) = (left[m], der(&left));
        let (yr, dr) = (right[m], der(&right));
        let w = yl * dr - dl * yr;
        let scale = (yl * yl + dl * dl).sqrt() * (yr * yr + dr * dr).sqrt();
        let mismatch = if scale > 0.0 { w / scale } else { 0.0 };
        Trial {
            eps,
            mismatch,
            meet: m,
            left,
            right,
            left_start,
            right_start,
        }
    }
}

impl Trial {
    /// The stitched solution, unit `L²` norm, positive at its largest sample.
    pub fn state(&self, shooter: &Shooter) -> Result<SampledFunction> {
        let u = shooter.u;
        let n = u.len();
        let m = self.meet;
        let ratio = if self.right[m].abs() > 1e-300 && self.left[m].abs() > 1e-300 {
            self.left[m] / self.right[m]
        } else {
            self.left[m + 1] / self.right[m + 1]
        };
        let mut y: Vec<f64> = (0..n)
            .map(|i| {
                if i <= m {
                    self.left[i]
                } else {
                    ratio * self.right[i]
                }
            })
            .collect();
        // Frobenius samples inside the starts, continuous with the integration
        for i in 0..self.left_start {
            y[i] = shooter.start_value(i, true, shooter.left)
                * scale_at(&self.left, self.left_start, shooter, true);
        }
        for i in self.right_start + 1..n {
            y[i] = ratio
                * shooter.start_value(i, false, shooter.right)
                * scale_at(&self.right, self.right_start, shooter, false);
        }
        let k: Vec<f64> = (0..n).map(|i| shooter.k(i, self.eps)).collect();
        let h = u.grid().step();
        let dy_m = (y[m + 1] - y[m - 1]) / (2.0 * h)
            - h / 12.0 * (k[m + 1] * y[m + 1] - k[m - 1] * y[m - 1]);
        let dy = recover_derivative(u.grid(), &y, &k, None, m, dy_m, &vec![None; n]);
        let f = SampledFunction::new(u.grid().clone(), y, dy)?;
        let norm = integrate_all(&f.mul(&f)?).sqrt();
        let peak = f
            .values()
            .iter()
            .fold(0.0_f64, |a, v| if v.abs() > a.abs() { *v } else { a });
        let c = if norm > 0.0 {
            peak.signum() / norm
        } else {
            1.0
        };
        f.scale(c).with_ode(OdeContext {
            coeff: k.into(),
            inhom: None,
        })
    }

    /// Sign changes of the stitched solution on the interior.
    pub fn nodes(&self) -> usize {
        let m = self.meet;
        let count = |v: &[f64]| v.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        count(&self.left[self.left_start..=m]) + count(&self.right[m..=self.right_start])
    }
}

/// Ratio of the integrated value to the bare Frobenius value at a start index.
fn scale_at(y: &[f64], start: usize, shooter: &Shooter, left: bool) -> f64 {
    let bare = shooter.start_value(start, left, if left { shooter.left } else { shooter.right });
    if bare != 0.0 {
        y[start] / bare
    } else {
        0.0
    }
}
