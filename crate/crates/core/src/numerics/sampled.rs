use std::sync::Arc;

use super::diff::fd_derivative;
use super::dual::Dual2;
use super::grid::{same_grid, Grid};
use crate::error::{Error, Result};

/// The linear ODE `y'' = coeff * y + inhom` a sampled function satisfies.
#[derive(Debug, Clone)]
pub struct OdeContext {
    pub coeff: Arc<[f64]>,
    pub inhom: Option<Arc<[f64]>>,
}

/// How the second derivative of a [`SampledFunction`] is recovered.
#[derive(Debug, Clone)]
pub enum SecondOrder {
    Ode(OdeContext),
    Exact(Arc<[f64]>),
}

/// Values and first derivatives on a grid, optionally with an exact route to
/// the second derivative.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    second: Option<SecondOrder>,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        for len in [values.len(), derivs.len()] {
            if len != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: len,
                });
            }
        }
        Ok(SampledFunction {
            grid,
            values,
            derivs,
            second: None,
        })
    }

    /// Derivatives estimated by sixth-order finite differences.
    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        let derivs = fd_derivative(&values, grid.step(), 1)?;
        SampledFunction::new(grid, values, derivs)
    }

    /// Samples `f(x) -> (value, derivative)`.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> (f64, f64)) -> Self {
        let (values, derivs) = grid.points().iter().map(|&x| f(x)).unzip();
        SampledFunction {
            grid,
            values,
            derivs,
            second: None,
        }
    }

    /// Samples a closed form through [`Dual2`], keeping the exact second derivative.
    pub fn from_dual(grid: Arc<Grid>, f: impl Fn(Dual2) -> Dual2) -> Self {
        let jets: Vec<Dual2> = grid.points().iter().map(|&x| f(Dual2::var(x))).collect();
        let values = jets.iter().map(|j| j.v).collect();
        let derivs = jets.iter().map(|j| j.d).collect();
        let second: Arc<[f64]> = jets.iter().map(|j| j.dd).collect();
        SampledFunction {
            grid,
            values,
            derivs,
            second: Some(SecondOrder::Exact(second)),
        }
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let n = grid.len();
        SampledFunction {
            grid,
            values: vec![c; n],
            derivs: vec![0.0; n],
            second: Some(SecondOrder::Exact(vec![0.0; n].into())),
        }
    }

    pub fn zero(grid: Arc<Grid>) -> Self {
        SampledFunction::constant(grid, 0.0)
    }

    pub fn with_ode(mut self, ctx: OdeContext) -> Result<Self> {
        check_len(&self.grid, ctx.coeff.len())?;
        if let Some(g) = &ctx.inhom {
            check_len(&self.grid, g.len())?;
        }
        self.second = Some(SecondOrder::Ode(ctx));
        Ok(self)
    }

    pub fn with_exact_second(mut self, second: Vec<f64>) -> Result<Self> {
        check_len(&self.grid, second.len())?;
        self.second = Some(SecondOrder::Exact(second.into()));
        Ok(self)
    }

    pub fn without_second(mut self) -> Self {
        self.second = None;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn deriv(&self, i: usize) -> f64 {
        self.derivs[i]
    }

    pub fn second_order(&self) -> Option<&SecondOrder> {
        self.second.as_ref()
    }

    pub fn ode_context(&self) -> Option<&OdeContext> {
        match &self.second {
            Some(SecondOrder::Ode(ctx)) => Some(ctx),
            _ => None,
        }
    }

    pub fn has_exact_second(&self) -> bool {
        self.second.is_some()
    }

    /// Second derivative: from the ODE relation or exact samples when present,
    /// otherwise by finite differences of the first derivative.
    pub fn second_derivative(&self) -> Vec<f64> {
        match &self.second {
            Some(SecondOrder::Ode(ctx)) => (0..self.len())
                .map(|i| ctx.coeff[i] * self.values[i] + ctx.inhom.as_ref().map_or(0.0, |g| g[i]))
                .collect(),
            Some(SecondOrder::Exact(s)) => s.to_vec(),
            None => fd_derivative(&self.derivs, self.grid.step(), 1)
                .expect("grid holds at least the stencil width"),
        }
    }

    fn exact_second(&self) -> Option<Vec<f64>> {
        self.second.as_ref().map(|_| self.second_derivative())
    }

    pub fn scale(&self, c: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            derivs: self.derivs.iter().map(|v| c * v).collect(),
            second: self
                .exact_second()
                .map(|s| SecondOrder::Exact(s.iter().map(|v| c * v).collect())),
        }
    }

    /// `a * self + b * other`, derivatives included.
    pub fn combine(&self, a: f64, other: &SampledFunction, b: f64) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        let lin = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
        };
        let second = match (self.exact_second(), other.exact_second()) {
            (Some(s), Some(t)) => Some(SecondOrder::Exact(lin(&s, &t).into())),
            _ => None,
        };
        Ok(SampledFunction {
            grid: self.grid.clone(),
            values: lin(&self.values, &other.values),
            derivs: lin(&self.derivs, &other.derivs),
            second,
        })
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.combine(1.0, other, -1.0)
    }

    /// Pointwise product with the product rule applied to the derivatives.
    pub fn mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        let n = self.len();
        let (f, df, g, dg) = (&self.values, &self.derivs, &other.values, &other.derivs);
        let second = match (self.exact_second(), other.exact_second()) {
            (Some(s), Some(t)) => Some(SecondOrder::Exact(
                (0..n)
                    .map(|i| s[i] * g[i] + 2.0 * df[i] * dg[i] + f[i] * t[i])
                    .collect(),
            )),
            _ => None,
        };
        Ok(SampledFunction {
            grid: self.grid.clone(),
            values: (0..n).map(|i| f[i] * g[i]).collect(),
            derivs: (0..n).map(|i| df[i] * g[i] + f[i] * dg[i]).collect(),
            second,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Indices `i` where the sign differs between samples `i` and `i + 1`, or a sample is exactly zero.
    pub fn sign_changes(&self) -> Vec<usize> {
        sign_changes(&self.values)
    }

    pub fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if same_grid(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..values.len().saturating_sub(1) {
        if values[i] == 0.0 || values[i] * values[i + 1] < 0.0 {
            out.push(i);
        }
    }
    if values.last() == Some(&0.0) {
        out.push(values.len() - 1);
    }
    out
}

fn check_len(grid: &Grid, got: usize) -> Result<()> {
    if got == grid.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: grid.len(),
            got,
        })
    }
}
