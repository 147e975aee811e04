use super::sampled::SampledFunction;
use crate::error::{Error, Result};

/// Stencil width of the finite-difference formulas (sixth order for f').
pub const STENCIL: usize = 7;

/// Fornberg weights: `w[k][j]` multiplies `f(xs[j])` in the k-th derivative at `x0`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Finite-difference derivative of uniformly spaced samples, central in the
/// interior and one-sided near the ends.
pub fn fd_derivative(values: &[f64], h: f64, order: usize) -> Result<Vec<f64>> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "derivative order {order} not in {{1, 2}}"
        )));
    }
    let n = values.len();
    if n < STENCIL {
        return Err(Error::TooFewPoints {
            min: STENCIL,
            got: n,
        });
    }
    let half = STENCIL / 2;
    let nodes: Vec<f64> = (0..STENCIL).map(|j| j as f64).collect();
    // one weight set per position of the evaluation point inside the window
    let tables: Vec<Vec<f64>> = (0..STENCIL)
        .map(|p| {
            let w = fornberg_weights(p as f64, &nodes, order);
            w[order].iter().map(|c| c / h.powi(order as i32)).collect()
        })
        .collect();
    let mut out = vec![0.0; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let start = i.saturating_sub(half).min(n - STENCIL);
        let w = &tables[i - start];
        *slot = w
            .iter()
            .zip(&values[start..start + STENCIL])
            .map(|(c, v)| c * v)
            .sum();
    }
    Ok(out)
}

/// Derivative of order 1 or 2 as a new sampled function. Stored first
/// derivatives and exact second-derivative routes are preferred; only the
/// remaining orders fall back to finite differences.
pub fn differentiate(f: &SampledFunction, order: usize) -> Result<SampledFunction> {
    let h = f.grid().step();
    match order {
        1 => SampledFunction::new(f.grid().clone(), f.derivs().to_vec(), f.second_derivative()),
        2 => {
            let second = f.second_derivative();
            let third = fd_derivative(&second, h, 1)?;
            SampledFunction::new(f.grid().clone(), second, third)
        }
        _ => Err(Error::InvalidArgument(format!(
            "derivative order {order} not in {{1, 2}}"
        ))),
    }
}
