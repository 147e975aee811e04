//! Numerov integration of `y'' = k(x) y + g(x)` on a uniform grid.

use std::sync::Arc;

use super::grid::Grid;
use super::sampled::{OdeContext, SampledFunction};
use crate::error::{Error, Result};

pub const DEFAULT_BLOWUP_CAP: f64 = 1e150;

/// Below this value of `1 − h²k/12` a Numerov step is not resolved; the
/// solution is continued there by a local power law in the distance to the
/// endpoint instead.
const MIN_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub blowup_cap: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            blowup_cap: DEFAULT_BLOWUP_CAP,
        }
    }
}

/// Numerov recurrence for sampled `k` and optional `g`.
pub(crate) struct Numerov<'a> {
    pub k: &'a [f64],
    pub g: Option<&'a [f64]>,
    pub h2: f64,
}

impl Numerov<'_> {
    pub fn alpha(&self, i: usize) -> f64 {
        1.0 - self.h2 * self.k[i] / 12.0
    }

    fn src(&self, i: usize) -> f64 {
        self.g.map_or(0.0, |g| g[i])
    }

    /// Value at `next` from the values at `prev` and `cur` (indices adjacent, either direction).
    pub fn step(
        &self,
        prev: usize,
        cur: usize,
        next: usize,
        y_prev: f64,
        y_cur: f64,
    ) -> Option<f64> {
        let a_next = self.alpha(next);
        if a_next < MIN_ALPHA {
            return None;
        }
        let rhs = 2.0 * y_cur * (1.0 + 5.0 * self.h2 * self.k[cur] / 12.0)
            - y_prev * self.alpha(prev)
            + self.h2 / 12.0 * (self.src(next) + 10.0 * self.src(cur) + self.src(prev));
        Some(rhs / a_next)
    }
}

/// Continues `y` to the point at distance `d_next` from the endpoint, given the
/// two previous samples at distances `d_prev`, `d_cur`, assuming `y ∝ d^σ`.
pub(crate) fn power_law_continue(
    y_prev: f64,
    y_cur: f64,
    d_prev: f64,
    d_cur: f64,
    d_next: f64,
) -> (f64, f64) {
    let sigma = if y_prev != 0.0 && y_cur / y_prev > 0.0 && d_cur != d_prev {
        (y_cur / y_prev).ln() / (d_cur / d_prev).ln()
    } else {
        0.0
    };
    (y_cur * (d_next / d_cur).powf(sigma), sigma)
}

fn check_finite(grid: &Grid, data: &[f64]) -> Result<()> {
    if data.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: data.len(),
        });
    }
    match data.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFiniteCoefficient { x: grid.x(i) }),
        None => Ok(()),
    }
}

/// Cubic extrapolation to a ghost point one step beyond index `i0` (direction `dir`).
fn ghost(data: &[f64], i0: usize, dir: isize) -> f64 {
    let at = |j: isize| data[(i0 as isize + dir * j) as usize];
    4.0 * at(0) - 6.0 * at(1) + 4.0 * at(2) - at(3)
}

/// Integrates `y'' = coeff * y + inhom` outward from `anchor` in both directions,
/// starting from `y(anchor) = y0`, `y'(anchor) = dy0`.
pub fn solve_linear_ode2(
    coeff: &[f64],
    inhom: Option<&[f64]>,
    grid: &Arc<Grid>,
    y0: f64,
    dy0: f64,
    anchor: usize,
    opts: &OdeOptions,
) -> Result<SampledFunction> {
    let n = grid.len();
    grid.check_index(anchor)?;
    check_finite(grid, coeff)?;
    if let Some(g) = inhom {
        check_finite(grid, g)?;
    }
    let h = grid.step();
    let num = Numerov {
        k: coeff,
        g: inhom,
        h2: h * h,
    };
    let src = |i: usize| inhom.map_or(0.0, |g| g[i]);

    // y at anchor ± 1 from the Numerov relation and the derivative formula
    //   y'_0 = (y_+ − y_−)/2h − h/12 (y''_+ − y''_−)
    let (k_m, g_m, k_p, g_p) = if anchor == 0 {
        let gm = inhom.map_or(0.0, |g| ghost(g, 0, 1));
        (ghost(coeff, 0, 1), gm, coeff[1], src(1))
    } else if anchor == n - 1 {
        let gp = inhom.map_or(0.0, |g| ghost(g, n - 1, -1));
        (coeff[n - 2], src(n - 2), ghost(coeff, n - 1, -1), gp)
    } else {
        (
            coeff[anchor - 1],
            src(anchor - 1),
            coeff[anchor + 1],
            src(anchor + 1),
        )
    };
    let h2 = h * h;
    let (a_p, a_m) = (1.0 - h2 * k_p / 12.0, 1.0 - h2 * k_m / 12.0);
    let r1 = 2.0 * y0 * (1.0 + 5.0 * h2 * coeff[anchor] / 12.0)
        + h2 / 12.0 * (g_p + 10.0 * src(anchor) + g_m);
    let (c_p, c_m) = (0.5 / h - h * k_p / 12.0, 0.5 / h - h * k_m / 12.0);
    let r2 = dy0 + h / 12.0 * (g_p - g_m);
    // [a_p a_m; c_p −c_m] [y_p; y_m] = [r1; r2]
    let det = -a_p * c_m - a_m * c_p;
    let y_p = (-r1 * c_m - a_m * r2) / det;
    let y_m = (a_p * r2 - c_p * r1) / det;

    let mut y = vec![0.0; n];
    let mut sigma: Vec<Option<f64>> = vec![None; n];
    y[anchor] = y0;
    let cap = opts.blowup_cap;
    let blow = |i: usize, v: f64| -> Result<()> {
        if v.abs() > cap || !v.is_finite() {
            Err(Error::BlowUp { x: grid.x(i), cap })
        } else {
            Ok(())
        }
    };

    // forward
    if anchor + 1 < n {
        y[anchor + 1] = y_p;
        blow(anchor + 1, y_p)?;
        for i in anchor + 1..n - 1 {
            let v = match num.step(i - 1, i, i + 1, y[i - 1], y[i]) {
                Some(v) => v,
                None => {
                    let d = |j: usize| grid.distance_to_end(grid.x(j), false);
                    let (v, s) = power_law_continue(y[i - 1], y[i], d(i - 1), d(i), d(i + 1));
                    sigma[i + 1] = Some(s);
                    v
                }
            };
            blow(i + 1, v)?;
            y[i + 1] = v;
        }
    }
    // backward
    if anchor >= 1 {
        y[anchor - 1] = y_m;
        blow(anchor - 1, y_m)?;
        for i in (1..anchor).rev() {
            let v = match num.step(i + 1, i, i - 1, y[i + 1], y[i]) {
                Some(v) => v,
                None => {
                    let d = |j: usize| grid.distance_to_end(grid.x(j), true);
                    let (v, s) = power_law_continue(y[i + 1], y[i], d(i + 1), d(i), d(i - 1));
                    sigma[i - 1] = Some(s);
                    v
                }
            };
            blow(i - 1, v)?;
            y[i - 1] = v;
        }
    }

    let dy = recover_derivative(grid, &y, coeff, inhom, anchor, dy0, &sigma);
    let ctx = OdeContext {
        coeff: coeff.to_vec().into(),
        inhom: inhom.map(|g| g.to_vec().into()),
    };
    SampledFunction::new(grid.clone(), y, dy)?.with_ode(ctx)
}

/// Fourth-order derivative recovery from Numerov values using `y'' = k y + g`.
pub(crate) fn recover_derivative(
    grid: &Grid,
    y: &[f64],
    k: &[f64],
    g: Option<&[f64]>,
    anchor: usize,
    dy_anchor: f64,
    sigma: &[Option<f64>],
) -> Vec<f64> {
    let n = y.len();
    let h = grid.step();
    let ypp: Vec<f64> = (0..n)
        .map(|i| k[i] * y[i] + g.map_or(0.0, |g| g[i]))
        .collect();
    let mut dy = vec![0.0; n];
    for i in 1..n - 1 {
        dy[i] = (y[i + 1] - y[i - 1]) / (2.0 * h) - h / 12.0 * (ypp[i + 1] - ypp[i - 1]);
    }
    // one-sided: y' = Δy/h − h/2 y'' − h²/6 y''' − h³/24 y'''' with y''', y'''' from y'' samples
    let one_sided = |i0: usize, dir: isize| -> f64 {
        let at = |j: isize| (i0 as isize + dir * j) as usize;
        let (p0, p1, p2) = (ypp[at(0)], ypp[at(1)], ypp[at(2)]);
        let s = dir as f64;
        let d3 = s * (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * h);
        let d4 = (p0 - 2.0 * p1 + p2) / (h * h);
        let hs = s * h;
        (y[at(1)] - y[at(0)]) / hs - hs / 2.0 * p0 - hs * hs / 6.0 * d3 - hs * hs * hs / 24.0 * d4
    };
    dy[0] = one_sided(0, 1);
    dy[n - 1] = one_sided(n - 1, -1);
    for i in 0..n {
        if let Some(s) = sigma[i] {
            let left = i < n / 2;
            let d = grid.distance_to_end(grid.x(i), left);
            dy[i] = if left { s * y[i] / d } else { -s * y[i] / d };
        }
    }
    dy[anchor] = dy_anchor;
    dy
}

/// Samples a closure on the grid (coefficient helper).
pub fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    grid.points().iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_grid;

    #[test]
    fn harmonic_identity() {
        let g = build_grid(0.0, 10.0, 2001, false, false, 0.0).unwrap();
        let k = vec![-1.0; g.len()];
        let y = solve_linear_ode2(&k, None, &g, 0.0, 1.0, 0, &OdeOptions::default()).unwrap();
        for i in 0..g.len() {
            assert!((y.value(i) - g.x(i).sin()).abs() < 1e-8);
            assert!((y.deriv(i) - g.x(i).cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn interior_anchor_with_source() {
        // y = e^x − 1 solves y'' = y + 1
        let g = build_grid(-1.0, 1.0, 801, false, false, 0.0).unwrap();
        let k = vec![1.0; g.len()];
        let s = vec![1.0; g.len()];
        let a = g.midpoint_index();
        let x0 = g.x(a);
        let y = solve_linear_ode2(
            &k,
            Some(&s),
            &g,
            x0.exp() - 1.0,
            x0.exp(),
            a,
            &OdeOptions::default(),
        )
        .unwrap();
        for i in 0..g.len() {
            assert!((y.value(i) - (g.x(i).exp() - 1.0)).abs() < 1e-10);
            assert!((y.deriv(i) - g.x(i).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn reports_blowup() {
        let g = build_grid(0.0, 400.0, 4001, false, false, 0.0).unwrap();
        let k = vec![4.0; g.len()];
        let err = solve_linear_ode2(&k, None, &g, 1.0, 2.0, 0, &OdeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn rejects_non_finite_coefficients() {
        let g = build_grid(0.0, 1.0, 32, false, false, 0.0).unwrap();
        let mut k = vec![0.0; g.len()];
        k[7] = f64::NAN;
        let err = solve_linear_ode2(&k, None, &g, 1.0, 0.0, 0, &OdeOptions::default()).unwrap_err();
        assert_eq!(err, Error::NonFiniteCoefficient { x: g.x(7) });
    }
}
