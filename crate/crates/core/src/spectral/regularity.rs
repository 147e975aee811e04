use serde::Serialize;

use crate::dirac::admissible_c;
use crate::error::Result;
use crate::numerics::Anchor;
use crate::susy_core::{end_decay, EndKind, TransformResult};

/// Boundedness of the increasing function `I(x) = ∫ˣ 1/q̂²` on the whole domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralBound {
    Both,
    Above,
    Below,
    Neither,
}

/// Family parameters keeping `c + I(x)` of one sign: `c > above` (present when
/// `I` is bounded below) or `c < below` (present when `I` is bounded above).
/// Values are taken from the grid, anchored at its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleRange {
    pub above: Option<f64>,
    pub below: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub wronskian_nodeless: bool,
    pub interior_wronskian_zeros: Vec<f64>,
    pub q_hat_nodes: Vec<f64>,
    pub integral_bound: Option<IntegralBound>,
    pub admissible_c: Option<AdmissibleRange>,
    /// `λ ≤ ε0`, checked for third-order chains when `ε0` is known.
    pub lambda_below_ground: Option<bool>,
    pub warnings: Vec<String>,
    /// No interior Wronskian zeros and, when given, a nodeless `q̂`.
    pub regular: bool,
}

/// `1/q̂²` is integrable at a finite end when `q̂ ~ d^s` with `s < 1/2`, and at
/// an infinite end when `s > 1/2` in `|x|` (exponential growth fits a large `s`).
fn integrable(q_hat: &crate::numerics::SampledFunction, left: bool, kind: EndKind) -> Result<bool> {
    let s = end_decay(q_hat, left, kind)?.exponent;
    Ok(match kind {
        EndKind::Finite => s < 0.5,
        EndKind::Infinite => s > 0.5,
    })
}

/// Regularity of a transformation and, optionally, of the zero-energy
/// solution `q̂` that defines the transformed `q1`.
pub fn regularity_report(
    tr: &TransformResult,
    q_hat: Option<&crate::numerics::SampledFunction>,
    ends: (EndKind, EndKind),
    eps0: Option<f64>,
) -> Result<RegularityReport> {
    let mut warnings = Vec::new();
    let wronskian_nodeless = tr.wron.nodeless_interior;
    let interior_wronskian_zeros = tr.wron.interior_zero_positions();
    let mut q_hat_nodes = Vec::new();
    let mut integral_bound = None;
    let mut admissible = None;
    if let Some(q) = q_hat {
        let n = q.len();
        q_hat_nodes = q
            .sign_changes()
            .into_iter()
            .filter(|&i| i > 0 && i + 2 < n)
            .map(|i| q.grid().x(i))
            .collect();
        if q_hat_nodes.is_empty() {
            let below = integrable(q, true, ends.0)?;
            let above = integrable(q, false, ends.1)?;
            let bound = match (above, below) {
                (true, true) => IntegralBound::Both,
                (true, false) => IntegralBound::Above,
                (false, true) => IntegralBound::Below,
                (false, false) => IntegralBound::Neither,
            };
            integral_bound = Some(bound);
            let grid_range = admissible_c(q, Anchor::Midpoint)?;
            admissible = Some(AdmissibleRange {
                above: below.then_some(grid_range.above),
                below: above.then_some(grid_range.below),
            });
            if bound == IntegralBound::Neither {
                warnings.push(
                    "∫ 1/q̂² is unbounded in both directions; only the particular q1 is regular"
                        .into(),
                );
            }
        }
    }
    let lambda_below_ground = match (tr.chain.order(), eps0) {
        (3, Some(e0)) => {
            let ok = tr.chain.lambda() <= e0 + 1e-9 * e0.abs().max(1.0);
            if !ok {
                warnings.push(format!(
                    "λ = {} exceeds the ground level ε0 = {e0}",
                    tr.chain.lambda()
                ));
            }
            Some(ok)
        }
        _ => None,
    };
    let regular = wronskian_nodeless && q_hat_nodes.is_empty();
    Ok(RegularityReport {
        wronskian_nodeless,
        interior_wronskian_zeros,
        q_hat_nodes,
        integral_bound,
        admissible_c: admissible,
        lambda_below_ground,
        warnings,
        regular,
    })
}
