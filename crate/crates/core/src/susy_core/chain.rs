//! Jordan chains `u_j'' = (U0 − λ) u_j − u_{j−1}` and their construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::mixed_norm;
use crate::numerics::{
    antiderivative, cumulative, solve_linear_ode2, Anchor, Dual2, OdeContext, OdeOptions,
    SampledFunction,
};

/// `u0` counts as vanishing at an end when its end sample is below this
/// fraction of its largest magnitude.
pub const VANISH_REL: f64 = 1e-6;

/// `h |(1/u0²)' / (1/u0²)|` above which the quadrature form is not trusted.
const ZONE_RESOLUTION: f64 = 0.01;
/// Largest `|coeff| h²` for which the outward ODE route is trusted instead.
const ZONE_COEFF: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryBehavior {
    pub vanishes_left: bool,
    pub vanishes_right: bool,
}

impl BoundaryBehavior {
    pub fn of(u0: &SampledFunction) -> Self {
        let top = u0.max_abs();
        let n = u0.len();
        BoundaryBehavior {
            vanishes_left: u0.value(0).abs() < VANISH_REL * top,
            vanishes_right: u0.value(n - 1).abs() < VANISH_REL * top,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JordanChain {
    lambda: f64,
    members: Vec<SampledFunction>,
    potential: SampledFunction,
    boundary: BoundaryBehavior,
}

impl JordanChain {
    pub fn new(
        lambda: f64,
        potential: SampledFunction,
        members: Vec<SampledFunction>,
    ) -> Result<Self> {
        let Some(u0) = members.first() else {
            return Err(Error::InvalidArgument(
                "a Jordan chain needs at least one member".into(),
            ));
        };
        for m in &members {
            m.check_same_grid(&potential)?;
        }
        let boundary = BoundaryBehavior::of(u0);
        Ok(JordanChain {
            lambda,
            members,
            potential,
            boundary,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn member(&self, j: usize) -> &SampledFunction {
        &self.members[j]
    }

    pub fn u0(&self) -> &SampledFunction {
        &self.members[0]
    }

    pub fn potential(&self) -> &SampledFunction {
        &self.potential
    }

    pub fn boundary(&self) -> BoundaryBehavior {
        self.boundary
    }

    /// `U0 − λ` on the grid.
    pub fn coefficient(&self) -> Vec<f64> {
        self.potential
            .values()
            .iter()
            .map(|u| u - self.lambda)
            .collect()
    }

    /// Mixed-norm residual of each chain relation on the interior points,
    /// with `u_j''` taken from the member's own second-derivative route.
    pub fn residuals(&self) -> Vec<f64> {
        let p = self.coefficient();
        let n = p.len();
        (0..self.order())
            .map(|j| {
                let u = &self.members[j];
                let upp = u.second_derivative();
                let prev = |i: usize| {
                    if j == 0 {
                        0.0
                    } else {
                        self.members[j - 1].value(i)
                    }
                };
                let (res, scale): (Vec<f64>, Vec<f64>) = (1..n - 1)
                    .map(|i| {
                        let pu = p[i] * u.value(i);
                        let r = upp[i] - pu + prev(i);
                        (r, upp[i].abs().max(pu.abs()).max(prev(i).abs()))
                    })
                    .unzip();
                mixed_norm(&res, &scale)
            })
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }
}

/// Integration data for [`chain_from_u0_integral`]. Member `j ≥ 1` is
///
/// `u_j = û + u0 (a_j + ∫_outer v0 u_{j−1}) − v0 (c_j + ∫_inner u0 u_{j−1})`
///
/// with `W(u0, v0) = 1`, so that `W(u0, u1) = −(c_1 + ∫_inner u0²)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegralOptions {
    pub inner_anchor: Anchor,
    pub outer_anchor: Anchor,
    /// `a_j` for `j = 1, 2, …`; missing entries are zero.
    pub outer_constants: Vec<f64>,
    pub partner_anchor: Anchor,
}

/// Builds a chain of the given order from `u0` by repeated variation of
/// constants. `inner_constants[j − 1]` is `c_j`; missing entries are zero.
pub fn chain_from_u0_integral(
    u0: &SampledFunction,
    potential: &SampledFunction,
    lambda: f64,
    order: usize,
    u_hat: Option<&SampledFunction>,
    inner_constants: &[f64],
    opts: &IntegralOptions,
) -> Result<JordanChain> {
    u0.check_same_grid(potential)?;
    if order == 0 {
        return Err(Error::InvalidArgument(
            "chain order must be at least 1".into(),
        ));
    }
    let p: Vec<f64> = potential.values().iter().map(|u| u - lambda).collect();
    let u0 = if u0.has_exact_second() {
        u0.clone()
    } else {
        u0.clone().with_ode(OdeContext {
            coeff: p.clone().into(),
            inhom: None,
        })?
    };
    let mut members = vec![u0.clone()];
    if order > 1 {
        let v0 = partner(&u0, Some(&p), opts.partner_anchor)?;
        for j in 1..order {
            let a = opts.outer_constants.get(j - 1).copied().unwrap_or(0.0);
            let c = inner_constants.get(j - 1).copied().unwrap_or(0.0);
            let next = next_member(&u0, &v0, &members[j - 1], u_hat, opts, a, c)?;
            members.push(next);
        }
    }
    JordanChain::new(lambda, potential.clone(), members)
}

/// One variation-of-constants step from `prev = u_{j−1}`.
pub(crate) fn next_member(
    u0: &SampledFunction,
    v0: &SampledFunction,
    prev: &SampledFunction,
    u_hat: Option<&SampledFunction>,
    opts: &IntegralOptions,
    a: f64,
    c: f64,
) -> Result<SampledFunction> {
    let f = antiderivative(&v0.mul(prev)?, opts.outer_anchor, a)?;
    let g = antiderivative(&u0.mul(prev)?, opts.inner_anchor, c)?;
    let n = u0.len();
    let (u0pp, v0pp) = (u0.second_derivative(), v0.second_derivative());
    let mut val = vec![0.0; n];
    let mut der = vec![0.0; n];
    let mut sec = vec![0.0; n];
    for i in 0..n {
        let (fi, gi) = (f.value(i), g.value(i));
        val[i] = u0.value(i) * fi - v0.value(i) * gi;
        der[i] = u0.deriv(i) * fi - v0.deriv(i) * gi;
        let w = u0.deriv(i) * v0.value(i) - v0.deriv(i) * u0.value(i);
        sec[i] = u0pp[i] * fi - v0pp[i] * gi + w * prev.value(i);
    }
    let mut out = SampledFunction::new(u0.grid().clone(), val, der)?.with_exact_second(sec)?;
    if let Some(h) = u_hat {
        out = out.add(h)?;
    }
    Ok(out)
}

/// Second solution with `W(u0, v0) = 1`. A nodeless `u0` gives
/// `v0 = u0 ∫_anchor 1/u0²`; otherwise the ODE of `u0` is integrated, which
/// needs its ODE context.
pub fn partner_solution_v0(u0: &SampledFunction, anchor: Anchor) -> Result<SampledFunction> {
    partner(u0, None, anchor)
}

pub(crate) fn partner(
    u0: &SampledFunction,
    coeff: Option<&[f64]>,
    anchor: Anchor,
) -> Result<SampledFunction> {
    let n = u0.len();
    if u0.max_abs() == 0.0 {
        return Err(Error::InvalidArgument("u0 vanishes identically".into()));
    }
    let nodeless = u0.values().iter().all(|v| *v != 0.0) && u0.sign_changes().is_empty();
    if nodeless {
        let inv = SampledFunction::new(
            u0.grid().clone(),
            u0.values().iter().map(|v| 1.0 / (v * v)).collect(),
            (0..n)
                .map(|i| -2.0 * u0.deriv(i) / u0.value(i).powi(3))
                .collect(),
        )?;
        let big_i = antiderivative(&inv, anchor, 0.0)?;
        let u0pp = u0.second_derivative();
        let val = (0..n).map(|i| u0.value(i) * big_i.value(i)).collect();
        let der = (0..n)
            .map(|i| u0.deriv(i) * big_i.value(i) + 1.0 / u0.value(i))
            .collect();
        let sec = (0..n).map(|i| u0pp[i] * big_i.value(i)).collect();
        return SampledFunction::new(u0.grid().clone(), val, der)?.with_exact_second(sec);
    }

    let coeff: Vec<f64> = match (coeff, u0.ode_context()) {
        (Some(c), _) => c.to_vec(),
        (None, Some(ctx)) if ctx.inhom.is_none() => ctx.coeff.to_vec(),
        _ => {
            let x = u0.sign_changes().first().map_or(0.0, |&i| u0.grid().x(i));
            return Err(Error::SingularChain { x });
        }
    };
    let b = BoundaryBehavior::of(u0);
    let peak = (0..n)
        .max_by(|&i, &j| u0.value(i).abs().total_cmp(&u0.value(j).abs()))
        .unwrap_or(0);
    // start where the wanted solution is dominant in the direction of integration
    let (start, y0, dy0) = match (b.vanishes_left, b.vanishes_right) {
        (false, true) => (0, 0.0, 1.0),
        (true, false) => (n - 1, 0.0, 1.0),
        _ => {
            let (u, du) = (u0.value(peak), u0.deriv(peak));
            let r = u * u + du * du;
            (peak, -du / r, u / r)
        }
    };
    let ctx = OdeContext {
        coeff: coeff.clone().into(),
        inhom: None,
    };
    let target = if start == peak { y0 } else { 0.0 };
    if let Some((mut val, mut der)) = finite_part(u0, &coeff, start, target)? {
        end_zone(u0, &coeff, &mut val, &mut der, true)?;
        end_zone(u0, &coeff, &mut val, &mut der, false)?;
        return SampledFunction::new(u0.grid().clone(), val, der)?.with_ode(ctx);
    }
    let v = solve_linear_ode2(
        &coeff,
        None,
        u0.grid(),
        y0,
        dy0,
        start,
        &OdeOptions::default(),
    )?;
    let w = u0.value(peak) * v.deriv(peak) - u0.deriv(peak) * v.value(peak);
    if w == 0.0 || !w.is_finite() {
        return Err(Error::InvalidArgument(
            "partner solution is not independent of u0".into(),
        ));
    }
    v.scale(1.0 / w).with_ode(ctx)
}

/// `v0 = u0 (C + ∫ 1/u0²)` across simple nodes of `u0`. Since `u0'' = 0` at a
/// node, `1/u0² − 1/(a² (x − x_k)²)` is regular there, so the double poles are
/// subtracted and integrated in closed form. `None` if a sample of `u0` is an
/// exact zero. Fixes `v0(start) = target` and `W(u0, v0) = 1`.
fn finite_part(
    u0: &SampledFunction,
    coeff: &[f64],
    start: usize,
    target: f64,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let n = u0.len();
    if u0.values().contains(&0.0) {
        return Ok(None);
    }
    let g = u0.grid();
    let nodes: Vec<Node> = u0
        .sign_changes()
        .iter()
        .map(|&i| Node::new(u0, coeff, i))
        .collect();
    let (mut rem, mut drem, mut big_g) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (u, du) = (u0.value(i), u0.deriv(i));
        let x = g.x(i);
        // a sample next to a node takes that node's term from its interpolant,
        // since 1/u0² and the pole cancel to O(h²) of their size there
        let near = nodes.iter().position(|k| i == k.i || i == k.i + 1);
        let (mut r, mut dr) = match near {
            Some(j) => nodes[j].regular_part(if i == nodes[j].i { 0.0 } else { 1.0 }),
            None => (1.0 / (u * u), -2.0 * du / (u * u * u)),
        };
        for (j, k) in nodes.iter().enumerate() {
            let t = x - k.x;
            let a2 = k.a * k.a;
            big_g[i] -= 1.0 / (a2 * t);
            if Some(j) != near {
                r -= 1.0 / (a2 * t * t);
                dr += 2.0 / (a2 * t * t * t);
            }
        }
        rem[i] = r;
        drem[i] = dr;
    }
    let c = target / u0.value(start) - big_g[start];
    let big_r = cumulative(&SampledFunction::new(g.clone(), rem, drem)?, start, c)?;
    let val = (0..n)
        .map(|i| u0.value(i) * (big_r.value(i) + big_g[i]))
        .collect();
    let der = (0..n)
        .map(|i| u0.deriv(i) * (big_r.value(i) + big_g[i]) + 1.0 / u0.value(i))
        .collect();
    Ok(Some((val, der)))
}

/// Where `u0` decays into an end, `1/u0²` outruns the quadrature within a few
/// steps of it. If the ODE coefficient stays small on the grid scale there,
/// the zone is redone by integrating outward from its inner edge.
fn end_zone(
    u0: &SampledFunction,
    coeff: &[f64],
    val: &mut [f64],
    der: &mut [f64],
    left: bool,
) -> Result<()> {
    let n = u0.len();
    let h = u0.grid().step();
    let sign = if left { 1.0 } else { -1.0 };
    let unresolved = |i: usize| sign * h * 2.0 * u0.deriv(i) / u0.value(i) > ZONE_RESOLUTION;
    let zone: Vec<usize> = if left {
        (0..n).take_while(|&i| unresolved(i)).collect()
    } else {
        (0..n).rev().take_while(|&i| unresolved(i)).collect()
    };
    let Some(&edge) = zone.last() else {
        return Ok(());
    };
    if zone.len() == n || zone.iter().any(|&i| (coeff[i] * h * h).abs() > ZONE_COEFF) {
        return Ok(());
    }
    let edge = if left { edge + 1 } else { edge - 1 };
    let v = solve_linear_ode2(
        coeff,
        None,
        u0.grid(),
        val[edge],
        der[edge],
        edge,
        &OdeOptions::default(),
    )?;
    for i in zone {
        val[i] = v.value(i);
        der[i] = v.deriv(i);
    }
    Ok(())
}

/// Simple node of `u0` between samples `i` and `i + 1`, located on the
/// quintic Hermite interpolant of values, derivatives and `u0'' = coeff · u0`
/// in the panel coordinate `s = (x − x_i)/h`.
struct Node {
    i: usize,
    h: f64,
    x: f64,
    a: f64,
    /// `p(s) = (s − s_k) Q(s)`, coefficients of `Q`.
    quot: [f64; 5],
    /// `Q(s) = Q(s_k) + (s − s_k) Q'(s_k) + (s − s_k)² R(s)`, coefficients of `R`.
    rest: [f64; 3],
}

impl Node {
    fn new(u0: &SampledFunction, coeff: &[f64], i: usize) -> Self {
        let g = u0.grid();
        let h = g.step();
        let (y0, y1) = (u0.value(i), u0.value(i + 1));
        let (d0, d1) = (h * u0.deriv(i), h * u0.deriv(i + 1));
        let (e0, e1) = (h * h * coeff[i] * y0, h * h * coeff[i + 1] * y1);
        let a = y1 - y0 - d0 - 0.5 * e0;
        let b = d1 - d0 - e0;
        let cc = e1 - e0;
        let c = [
            y0,
            d0,
            0.5 * e0,
            10.0 * a - 4.0 * b + 0.5 * cc,
            -15.0 * a + 7.0 * b - cc,
            6.0 * a - 3.0 * b + 0.5 * cc,
        ];
        let p = |s: f64| horner(&c, s);
        let dp = |s: f64| (1..6).rev().fold(0.0, |acc, k| acc * s + k as f64 * c[k]);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut s = y0 / (y0 - y1);
        for _ in 0..60 {
            let v = p(s);
            if v == 0.0 {
                break;
            }
            if v.signum() == y0.signum() {
                lo = s;
            } else {
                hi = s;
            }
            let next = s - v / dp(s);
            let next = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            let done = (next - s).abs() < 1e-15;
            s = next;
            if done {
                break;
            }
        }
        let quot: [f64; 5] = deflate(&c, s).try_into().expect("degree 4");
        let once = deflate(&quot, s);
        let rest: [f64; 3] = deflate(&once, s).try_into().expect("degree 2");
        Node {
            i,
            h,
            x: g.x(i) + s * h,
            a: horner(&quot, s) / h,
            quot,
            rest,
        }
    }

    /// `1/u0² − 1/(a² t²)` and its `x`-derivative at panel coordinate `s`,
    /// with `t = x − x_k`. With `q = u0/t`, this is `(a − q)(a + q)/(a² q² t²)`,
    /// and `(a − q)/t` is `−R(s)/h³` once the `u0''(x_k)/2` term, zero for an
    /// exact solution, is dropped.
    fn regular_part(&self, s: f64) -> (f64, f64) {
        let sv = Dual2::var(s);
        let h = self.h;
        let q = horner_dual(&self.quot, sv) / h;
        let w = horner_dual(&self.rest, sv) / (h * h * h);
        let f = -(w * (q + self.a)) / (q * q * (self.a * self.a));
        (f.v, f.d / h)
    }
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * s + k)
}

fn horner_dual(c: &[f64], s: Dual2) -> Dual2 {
    c.iter()
        .rev()
        .fold(Dual2::new(0.0, 0.0, 0.0), |acc, &k| acc * s + k)
}

/// Quotient of the polynomial `c` (ascending) by `s − r`, remainder dropped.
fn deflate(c: &[f64], r: f64) -> Vec<f64> {
    let m = c.len() - 1;
    let mut out = vec![0.0; m];
    let mut acc = 0.0;
    for k in (1..=m).rev() {
        acc = acc * r + c[k];
        out[k - 1] = acc;
    }
    out
}

/// Step control for [`chain_from_lambda_derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaDerivativeOptions {
    /// Defaults to `1e-4 · max(1, |λ|)`.
    pub h: Option<f64>,
    pub richardson: bool,
    /// Mixed-norm bound on the `u1` relation; defaults to `1e-7 + 100 h²`.
    pub tolerance: Option<f64>,
}

impl LambdaDerivativeOptions {
    pub fn step(&self, lambda: f64) -> f64 {
        self.h.unwrap_or(1e-4 * lambda.abs().max(1.0))
    }
}

/// Order-2 chain with `u1 = û + B v0 + ∂u0/∂λ`, the derivative taken by
/// central differences of `family` (λ ↦ u0 sampled on the potential's grid).
pub fn chain_from_lambda_derivative(
    family: impl Fn(f64) -> Result<SampledFunction>,
    potential: &SampledFunction,
    lambda: f64,
    u_hat: Option<&SampledFunction>,
    b: f64,
    opts: &LambdaDerivativeOptions,
) -> Result<JordanChain> {
    let h = opts.step(lambda);
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "λ step must be positive, got {h}"
        )));
    }
    let u0 = family(lambda)?;
    u0.check_same_grid(potential)?;
    let diff = |h: f64| -> Result<[Vec<f64>; 3]> {
        let (up, um) = (family(lambda + h)?, family(lambda - h)?);
        let (sp, sm) = (up.second_derivative(), um.second_derivative());
        let d = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        };
        Ok([
            d(up.values(), um.values()),
            d(up.derivs(), um.derivs()),
            d(&sp, &sm),
        ])
    };
    let mut parts = diff(h)?;
    if opts.richardson {
        let fine = diff(0.5 * h)?;
        for (coarse, fine) in parts.iter_mut().zip(fine) {
            for (c, f) in coarse.iter_mut().zip(fine) {
                *c = (4.0 * f - *c) / 3.0;
            }
        }
    }
    let [val, der, sec] = parts;
    let mut u1 = SampledFunction::new(u0.grid().clone(), val, der)?.with_exact_second(sec)?;
    if let Some(uh) = u_hat {
        u1 = u1.add(uh)?;
    }
    if b != 0.0 {
        let p: Vec<f64> = potential.values().iter().map(|u| u - lambda).collect();
        let v0 = partner(&u0, Some(&p), Anchor::Midpoint)?;
        u1 = u1.combine(1.0, &v0, b)?;
    }
    let chain = JordanChain::new(lambda, potential.clone(), vec![u0, u1])?;
    let tolerance = opts.tolerance.unwrap_or(1e-7 + 100.0 * h * h);
    let residual = chain.residuals()[1];
    if !(residual <= tolerance) {
        return Err(Error::ChainResidual {
            residual,
            tolerance,
        });
    }
    Ok(chain)
}
