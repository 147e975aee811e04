//! Wronskians of Jordan chains, extended by at most one solution column.
//!
//! Rows beyond the first derivative are never formed from derivatives of the
//! members. Subtracting column-independent multiples of lower rows turns the
//! derivative rows of chain column `j` into
//! `R_{2k} = (−1)^k u_{j−k}`, `R_{2k+1} = (−1)^k u'_{j−k}` (zero for `k > j`),
//! and those of a solution at energy ε into `δ^k ψ`, `δ^k ψ'` with `δ = λ − ε`.
//! Both obey `R_{2k}' = R_{2k+1}`, `R_{2k+1}' = p R_{2k} + R_{2k+2}`
//! (`p = U0 − λ`), which gives for `M` columns
//!
//! * `W   = det(R_0 … R_{M−1})`
//! * `W'  = det(R_0 … R_{M−2}, R_M)`
//! * `W'' = det(R_0 … R_{M−3}, R_{M−1}, R_M) + det(R_0 … R_{M−2}, R_{M+1}) + [M odd] p W`.

use serde::Serialize;

use super::chain::JordanChain;
use crate::error::{Error, Result};
use crate::numerics::linalg::det;
use crate::numerics::{fd_derivative, SampledFunction};

pub const DEFAULT_TAU_NODE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroScan {
    /// Indices with a sign change to the next sample, or a local minimum of
    /// `|w|` below `τ · max|w|`.
    pub zero_locations: Vec<usize>,
    pub nodeless_interior: bool,
    pub identically_zero: bool,
}

/// Zero classification of sampled values. Flags at the first and last index
/// only are endpoint zeros and keep the interior nodeless.
pub fn scan_zeros(values: &[f64], tau: f64) -> ZeroScan {
    let n = values.len();
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let thresh = tau * top;
    let mut zeros = Vec::new();
    for i in 0..n {
        let a = values[i].abs();
        let crossing = i + 1 < n && (values[i] == 0.0 || values[i] * values[i + 1] < 0.0);
        let left_ok = i == 0 || a <= values[i - 1].abs();
        let right_ok = i + 1 == n || a <= values[i + 1].abs();
        if crossing || (a <= thresh && left_ok && right_ok) {
            zeros.push(i);
        }
    }
    // a crossing between the last two samples belongs to the right end
    let nodeless = zeros.iter().all(|&i| i == 0 || i + 2 >= n) && top > 0.0;
    ZeroScan {
        zero_locations: zeros,
        nodeless_interior: nodeless,
        identically_zero: top == 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct WronskianData {
    /// `W(u0 … u_{N−1})` with exact first and second derivatives.
    pub w: SampledFunction,
    /// `W(u0 … u_{N−2})`; the constant 1 for `N = 1`.
    pub w_sub: SampledFunction,
    pub nodeless_interior: bool,
    pub zero_locations: Vec<usize>,
    pub identically_zero: bool,
}

impl WronskianData {
    /// `bound[i]` is the Hadamard bound of the determinant at point `i`; `W`
    /// below `τ · bound` everywhere counts as identically zero.
    fn from_parts(w: SampledFunction, w_sub: SampledFunction, tau: f64, bound: &[f64]) -> Self {
        let scan = scan_zeros(w.values(), tau);
        let identically_zero = scan.identically_zero
            || w.values()
                .iter()
                .zip(bound)
                .all(|(v, b)| v.abs() <= tau * b);
        WronskianData {
            w,
            w_sub,
            nodeless_interior: scan.nodeless_interior && !identically_zero,
            zero_locations: scan.zero_locations,
            identically_zero,
        }
    }

    pub fn zero_positions(&self) -> Vec<f64> {
        self.zero_locations
            .iter()
            .map(|&i| self.w.grid().x(i))
            .collect()
    }

    /// Zero locations strictly inside the domain.
    pub fn interior_zero_positions(&self) -> Vec<f64> {
        let n = self.w.len();
        self.zero_locations
            .iter()
            .filter(|&&i| i > 0 && i + 2 < n)
            .map(|&i| self.w.grid().x(i))
            .collect()
    }
}

/// A determinant column.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Column<'a> {
    Chain(usize),
    /// A solution of the initial equation with `δ = λ − ε`.
    Solution(&'a SampledFunction, f64),
}

struct Jet {
    w: Vec<f64>,
    dw: Vec<f64>,
    ddw: Vec<f64>,
    bound: Vec<f64>,
}

/// Product of the column norms of a row-major `m × m` matrix.
fn hadamard(buf: &[f64], m: usize) -> f64 {
    (0..m)
        .map(|c| (0..m).map(|r| buf[r * m + c].powi(2)).sum::<f64>().sqrt())
        .product()
}

fn reduced_row(chain: &JordanChain, col: Column, k: usize, i: usize) -> f64 {
    let m = k / 2;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    match col {
        Column::Chain(j) => {
            if m > j {
                return 0.0;
            }
            let u = chain.member(j - m);
            sign * if k % 2 == 0 { u.value(i) } else { u.deriv(i) }
        }
        Column::Solution(f, delta) => {
            let s = delta.powi(m as i32);
            s * if k % 2 == 0 { f.value(i) } else { f.deriv(i) }
        }
    }
}

fn jet(chain: &JordanChain, cols: &[Column]) -> Jet {
    let big_m = cols.len();
    let n = chain.u0().len();
    let p = chain.coefficient();
    let mut buf = vec![0.0; big_m * big_m];
    let mut eval = |rows: &[usize], i: usize, bound: Option<&mut f64>| -> f64 {
        for (r, &k) in rows.iter().enumerate() {
            for (c, &col) in cols.iter().enumerate() {
                buf[r * big_m + c] = reduced_row(chain, col, k, i);
            }
        }
        if let Some(b) = bound {
            *b = hadamard(&buf, big_m);
        }
        det(&mut buf, big_m)
    };
    let base: Vec<usize> = (0..big_m).collect();
    let mut first: Vec<usize> = (0..big_m - 1).collect();
    first.push(big_m);
    let mut last_two = None;
    if big_m >= 2 {
        let mut r: Vec<usize> = (0..big_m - 2).collect();
        r.extend([big_m - 1, big_m]);
        last_two = Some(r);
    }
    let mut shifted: Vec<usize> = (0..big_m - 1).collect();
    shifted.push(big_m + 1);

    let mut out = Jet {
        w: vec![0.0; n],
        dw: vec![0.0; n],
        ddw: vec![0.0; n],
        bound: vec![0.0; n],
    };
    for i in 0..n {
        let w = eval(&base, i, Some(&mut out.bound[i]));
        let dw = eval(&first, i, None);
        let mut ddw = eval(&shifted, i, None);
        if let Some(r) = &last_two {
            ddw += eval(r, i, None);
        }
        if big_m % 2 == 1 {
            ddw += p[i] * w;
        }
        out.w[i] = w;
        out.dw[i] = dw;
        out.ddw[i] = ddw;
    }
    out
}

fn jet_function(chain: &JordanChain, j: Jet) -> Result<(SampledFunction, Vec<f64>)> {
    let f = SampledFunction::new(chain.u0().grid().clone(), j.w, j.dw)?.with_exact_second(j.ddw)?;
    Ok((f, j.bound))
}

/// Wronskian data of a chain, all derivatives from the chain relations.
pub fn chain_wronskian(chain: &JordanChain, tau_node: f64) -> Result<WronskianData> {
    let n_ord = chain.order();
    let cols: Vec<Column> = (0..n_ord).map(Column::Chain).collect();
    let (w, bound) = jet_function(chain, jet(chain, &cols))?;
    let w_sub = if n_ord == 1 {
        SampledFunction::constant(chain.u0().grid().clone(), 1.0)
    } else {
        jet_function(chain, jet(chain, &cols[..n_ord - 1]))?.0
    };
    Ok(WronskianData::from_parts(w, w_sub, tau_node, &bound))
}

/// `W(chain…, extra)`, its first two derivatives and its Hadamard bound, as raw vectors.
pub(crate) fn extended_jet(chain: &JordanChain, extra: Column) -> [Vec<f64>; 4] {
    let mut cols: Vec<Column> = (0..chain.order()).map(Column::Chain).collect();
    cols.push(extra);
    let j = jet(chain, &cols);
    [j.w, j.dw, j.ddw, j.bound]
}

/// Wronskian of arbitrary functions from raw derivative rows. Up to three
/// members are supported; the third row uses each member's second-derivative
/// route, and `W'` is a finite difference of `W`. Chains should use
/// [`chain_wronskian`].
pub fn wronskian(members: &[SampledFunction], tau_node: f64) -> Result<WronskianData> {
    let n_ord = members.len();
    if n_ord == 0 || n_ord > 3 {
        return Err(Error::InvalidArgument(format!(
            "raw Wronskians take 1 to 3 functions, got {n_ord}; use chain_wronskian"
        )));
    }
    let grid = members[0].grid().clone();
    for m in members {
        m.check_same_grid(&members[0])?;
        if n_ord == 3 && !m.has_exact_second() {
            return Err(Error::MissingOdeContext(
                "third Wronskian row needs an ODE or exact second derivative".into(),
            ));
        }
    }
    let seconds: Vec<Vec<f64>> = if n_ord == 3 {
        members.iter().map(|m| m.second_derivative()).collect()
    } else {
        Vec::new()
    };
    let det_of = |count: usize| -> (Vec<f64>, Vec<f64>) {
        (0..grid.len())
            .map(|i| {
                let mut buf = vec![0.0; count * count];
                for (c, m) in members[..count].iter().enumerate() {
                    buf[c] = m.value(i);
                    if count > 1 {
                        buf[count + c] = m.deriv(i);
                    }
                    if count > 2 {
                        buf[2 * count + c] = seconds[c][i];
                    }
                }
                let b = hadamard(&buf, count);
                (det(&mut buf, count), b)
            })
            .unzip()
    };
    let with_fd = |v: Vec<f64>| -> Result<SampledFunction> {
        let d = fd_derivative(&v, grid.step(), 1)?;
        SampledFunction::new(grid.clone(), v, d)
    };
    let (wv, bound) = det_of(n_ord);
    let w = with_fd(wv)?;
    let w_sub = if n_ord == 1 {
        SampledFunction::constant(grid.clone(), 1.0)
    } else {
        with_fd(det_of(n_ord - 1).0)?
    };
    Ok(WronskianData::from_parts(w, w_sub, tau_node, &bound))
}

/// `W = w0 − ∫_anchor u0²`, the Wronskian of an order-2 chain up to its
/// constant. Non-increasing by construction.
pub fn wronskian_2nd_order(
    u0: &SampledFunction,
    w0: f64,
    anchor: crate::numerics::Anchor,
    tau_node: f64,
) -> Result<WronskianData> {
    let sq = u0.mul(u0)?;
    let integral = crate::numerics::antiderivative(&sq, anchor, 0.0)?;
    let n = u0.len();
    let val = (0..n).map(|i| w0 - integral.value(i)).collect();
    let der = sq.values().iter().map(|v| -v).collect();
    let sec = (0..n).map(|i| -2.0 * u0.value(i) * u0.deriv(i)).collect();
    let w = SampledFunction::new(u0.grid().clone(), val, der)?.with_exact_second(sec)?;
    let w_sub = u0.clone();
    let bound: Vec<f64> = integral
        .values()
        .iter()
        .map(|v| w0.abs() + v.abs())
        .collect();
    Ok(WronskianData::from_parts(w, w_sub, tau_node, &bound))
}
