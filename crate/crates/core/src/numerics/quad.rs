//! Fourth-order quadrature using sampled derivatives (end-corrected trapezoid):
//! each panel contributes h/2 (f_i + f_{i+1}) + h²/12 (f'_i − f'_{i+1}).

use super::grid::Anchor;
use super::sampled::SampledFunction;
use crate::error::{Error, Result};

/// Panels this close to an open end (in steps) may use the power-law rule.
const END_PANELS: f64 = 8.0;
const FLAT_EXPONENT: f64 = 0.1;

fn panel(f: &SampledFunction, i: usize, h: f64) -> f64 {
    let (v, d) = (f.values(), f.derivs());
    power_law_panel(f, i, h)
        .unwrap_or_else(|| 0.5 * h * (v[i] + v[i + 1]) + h * h / 12.0 * (d[i] - d[i + 1]))
}

/// Exact integral of `c · dist^s` through both samples of a panel next to an
/// open end, used when both samples' own log-derivatives agree with that
/// exponent. The end-corrected trapezoid is only exact to cubics, which leaves
/// O(1) relative errors where `f ~ dist^s` with `dist ≲ h`.
fn power_law_panel(f: &SampledFunction, i: usize, h: f64) -> Option<f64> {
    let g = f.grid();
    let (x0, x1) = (g.x(i), g.x(i + 1));
    let left = g.open_left() && g.distance_to_end(x0, true) < END_PANELS * h;
    let right = g.open_right() && g.distance_to_end(x1, false) < END_PANELS * h;
    if left == right {
        return None;
    }
    let (d0, d1) = (g.distance_to_end(x0, left), g.distance_to_end(x1, left));
    let (f0, f1) = (f.value(i), f.value(i + 1));
    if f0 == 0.0 || f1 == 0.0 || f0.signum() != f1.signum() || d0 <= 0.0 || d1 <= 0.0 {
        return None;
    }
    let s = (f1 / f0).ln() / (d1 / d0).ln();
    let dir = if left { 1.0 } else { -1.0 };
    let s0 = dir * d0 * f.deriv(i) / f0;
    let s1 = dir * d1 * f.deriv(i + 1) / f1;
    let tol = 1e-2 * (1.0 + s.abs());
    // a nearly flat end is left to the trapezoid, which is exact there to O(h⁴)
    if s.abs() < FLAT_EXPONENT
        || (s0 - s).abs() > tol
        || (s1 - s).abs() > tol
        || (s + 1.0).abs() < 1e-6
    {
        return None;
    }
    Some(dir * (f1 * d1 - f0 * d0) / (s + 1.0))
}

/// Integral of `f` between grid indices `from <= to`.
pub fn integrate(f: &SampledFunction, from: usize, to: usize) -> Result<f64> {
    let n = f.len();
    for idx in [from, to] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
    }
    if from > to {
        return Err(Error::InvalidArgument(format!(
            "integration bounds {from} > {to}"
        )));
    }
    let h = f.grid().step();
    Ok((from..to).map(|i| panel(f, i, h)).sum())
}

pub fn integrate_all(f: &SampledFunction) -> f64 {
    integrate(f, 0, f.len() - 1).expect("full range is valid")
}

/// Antiderivative `F` with `F(x_anchor) = constant`; `F' = f` holds exactly on the samples.
pub fn cumulative(f: &SampledFunction, anchor: usize, constant: f64) -> Result<SampledFunction> {
    let n = f.len();
    if anchor >= n {
        return Err(Error::IndexOutOfRange {
            index: anchor,
            len: n,
        });
    }
    let h = f.grid().step();
    let mut out = vec![0.0; n];
    out[anchor] = constant;
    for i in anchor..n - 1 {
        out[i + 1] = out[i] + panel(f, i, h);
    }
    for i in (0..anchor).rev() {
        out[i] = out[i + 1] - panel(f, i, h);
    }
    SampledFunction::new(f.grid().clone(), out, f.values().to_vec())?
        .with_exact_second(f.derivs().to_vec())
}

/// Antiderivative taking the value `constant` at `anchor`. For an endpoint
/// anchor on an open grid the gap to the true endpoint is bridged by
/// [`power_law_tail`].
pub fn antiderivative(
    f: &SampledFunction,
    anchor: Anchor,
    constant: f64,
) -> Result<SampledFunction> {
    let g = f.grid();
    let idx = anchor.index(g)?;
    let gap = match anchor {
        Anchor::Left if g.open_left() => power_law_tail(f, true),
        Anchor::Right if g.open_right() => power_law_tail(f, false).map(|t| -t),
        _ => Some(0.0),
    };
    let gap = gap.ok_or_else(|| {
        Error::InvalidArgument(format!(
            "integral anchored at {anchor:?} diverges at the endpoint"
        ))
    })?;
    cumulative(f, idx, constant + gap)
}

/// Integral of `f` over the gap between a true endpoint and the nearest
/// sample, assuming `f ∝ d^s` there (`d` = distance to the endpoint).
/// `None` when the local exponent makes the gap integral divergent.
pub fn power_law_tail(f: &SampledFunction, left: bool) -> Option<f64> {
    let g = f.grid();
    let i = if left { 0 } else { f.len() - 1 };
    let x = g.x(i);
    let d = g.distance_to_end(x, left);
    if d <= 0.0 {
        return Some(0.0);
    }
    let v = f.value(i);
    if v == 0.0 {
        return Some(0.0);
    }
    // d/dd log|f| = ∓ f'/f, so s = d * f'/f on the left and -d * f'/f on the right
    let s = if left {
        d * f.deriv(i) / v
    } else {
        -d * f.deriv(i) / v
    };
    if s <= -1.0 {
        None
    } else {
        Some(d * v / (s + 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_grid;
    use crate::numerics::dual::Scalar;

    #[test]
    fn trivial_integrals() {
        let g = build_grid(0.0, 1.0, 17, false, false, 0.0).unwrap();
        let one = SampledFunction::constant(g.clone(), 1.0);
        assert!((integrate_all(&one) - 1.0).abs() < 1e-15);
        let g2 = build_grid(0.0, 2.0, 17, false, false, 0.0).unwrap();
        let x = SampledFunction::from_fn(g2, |x| (x, 1.0));
        assert!((integrate_all(&x) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let g = build_grid(0.0, 2.0, n, false, false, 0.0).unwrap();
            let f = SampledFunction::from_dual(g, |x| (x * 3.0).sin() * x.exp());
            let exact = {
                // ∫ e^x sin 3x = e^x (sin 3x − 3 cos 3x) / 10
                let p = |x: f64| x.exp() * ((3.0 * x).sin() - 3.0 * (3.0 * x).cos()) / 10.0;
                p(2.0) - p(0.0)
            };
            (integrate_all(&f) - exact).abs()
        };
        let ratio = err(101) / err(201);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn cumulative_respects_anchor() {
        let g = build_grid(0.0, 1.0, 101, false, false, 0.0).unwrap();
        let f = SampledFunction::from_dual(g.clone(), |x| x.cos());
        let big_f = cumulative(&f, 50, 2.0).unwrap();
        assert_eq!(big_f.value(50), 2.0);
        for i in 0..g.len() {
            let exact = 2.0 + g.x(i).sin() - g.x(50).sin();
            assert!((big_f.value(i) - exact).abs() < 1e-10);
        }
        assert_eq!(big_f.derivs(), f.values());
    }

    #[test]
    fn endpoint_anchor_includes_gap() {
        let g = build_grid(0.0, 1.0, 201, true, true, 1e-3).unwrap();
        let f = SampledFunction::from_dual(g.clone(), |x| x * x);
        let left = antiderivative(&f, Anchor::Left, 0.0).unwrap();
        let right = antiderivative(&f, Anchor::Right, 0.0).unwrap();
        for i in [0, 100, 200] {
            let x = g.x(i);
            assert!((left.value(i) - x.powi(3) / 3.0).abs() < 1e-12);
            assert!((right.value(i) - (x.powi(3) - 1.0) / 3.0).abs() < 1e-5);
        }
        let blow = SampledFunction::from_dual(g, |x| x.powi(-3));
        assert!(antiderivative(&blow, Anchor::Left, 0.0).is_err());
    }

    #[test]
    fn tail_of_power_law() {
        let g = build_grid(0.0, 1.0, 101, true, false, 1e-2).unwrap();
        let f = SampledFunction::from_dual(g, |x| x.powi(4));
        let tail = power_law_tail(&f, true).unwrap();
        assert!((tail - 1e-10 / 5.0).abs() < 1e-22);
        let g = build_grid(0.0, 1.0, 101, true, false, 1e-2).unwrap();
        let f = SampledFunction::from_dual(g, |x| x.powi(-2));
        assert!(power_law_tail(&f, true).is_none());
    }
}
