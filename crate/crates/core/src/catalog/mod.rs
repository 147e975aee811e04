//! The three worked systems: a shifted Coulomb problem on the half line, a
//! shifted oscillator on the real line and a trigonometric problem on
//! `(0, π/2)`, with closed-form `q0`, spectra, eigenfunctions and the
//! transformation data used to delete or insert spectral values.

mod coulomb;
mod oscillator;
mod trig;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use coulomb::{coulomb_chain, coulomb_deletion_chain, coulomb_deletion_setup};
pub use oscillator::{oscillator_gamma_ratio, oscillator_insertion_setup, oscillator_u0};
pub use trig::{
    trig_chain, trig_printed_u1, trig_printed_u2, trig_third_order_setup, TRIG_INNER_CONSTANT,
};

use crate::dirac::{energy_map, PseudoscalarPotential, Spinor};
use crate::error::{Error, Result};
use crate::numerics::{build_grid, Dual2, Grid, SampledFunction, Scalar};
use crate::susy_core::{transform_solution_guarded, EndKind, JordanChain};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum SystemParams {
    Coulomb {
        ell: u32,
    },
    /// `A`, and the weights of the even and odd zero-energy solutions that generate `q0`.
    Oscillator {
        a: f64,
        #[serde(default = "one")]
        c1: f64,
        #[serde(default)]
        c2: f64,
    },
    Trig,
}

#[derive(Debug, Clone)]
pub struct ModelSystem {
    params: SystemParams,
    m: f64,
    grid: Arc<Grid>,
}

/// Highest Coulomb level the default cutoff is sized for.
pub const COULOMB_DEFAULT_LEVELS: usize = 3;
/// Default cutoff `x_max = COULOMB_CUTOFF_FACTOR · (n_max + ℓ + 1)`.
pub const COULOMB_CUTOFF_FACTOR: f64 = 30.0;
pub const COULOMB_STEP: f64 = 0.0125;
pub const OSCILLATOR_HALF_WIDTH: f64 = 8.0;
pub const OSCILLATOR_POINTS: usize = 4001;
pub const TRIG_POINTS: usize = 8001;
pub const TRIG_MARGIN: f64 = 1e-3;

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "mass must be positive, got {m}"
        )))
    }
}

pub fn coulomb_grid(ell: u32, n_max: usize) -> Result<Arc<Grid>> {
    let x_max = COULOMB_CUTOFF_FACTOR * (n_max as f64 + ell as f64 + 1.0);
    let n = (x_max / COULOMB_STEP).round() as usize + 1;
    build_grid(0.0, x_max, n, true, false, x_max / (n - 1) as f64)
}

pub fn coulomb_system(ell: u32, m: f64) -> Result<ModelSystem> {
    if ell == 0 {
        return Err(Error::InvalidArgument(
            "the Coulomb system needs ℓ ≥ 1".into(),
        ));
    }
    check_mass(m)?;
    let grid = coulomb_grid(ell, COULOMB_DEFAULT_LEVELS)?;
    Ok(ModelSystem {
        params: SystemParams::Coulomb { ell },
        m,
        grid,
    })
}

/// Fails with [`Error::NodalGenerator`] when the zero-energy solution that
/// defines `q0` has nodes on the grid.
pub fn oscillator_system(a: f64, c1: f64, c2: f64, m: f64) -> Result<ModelSystem> {
    check_mass(m)?;
    let grid = build_grid(
        -OSCILLATOR_HALF_WIDTH,
        OSCILLATOR_HALF_WIDTH,
        OSCILLATOR_POINTS,
        false,
        false,
        0.0,
    )?;
    let sys = ModelSystem {
        params: SystemParams::Oscillator { a, c1, c2 },
        m,
        grid,
    };
    sys.generator()?;
    Ok(sys)
}

pub fn trig_system(m: f64) -> Result<ModelSystem> {
    check_mass(m)?;
    let grid = build_grid(
        0.0,
        std::f64::consts::FRAC_PI_2,
        TRIG_POINTS,
        true,
        true,
        TRIG_MARGIN,
    )?;
    Ok(ModelSystem {
        params: SystemParams::Trig,
        m,
        grid,
    })
}

impl ModelSystem {
    pub fn from_params(params: &SystemParams, m: f64) -> Result<ModelSystem> {
        match *params {
            SystemParams::Coulomb { ell } => coulomb_system(ell, m),
            SystemParams::Oscillator { a, c1, c2 } => oscillator_system(a, c1, c2, m),
            SystemParams::Trig => trig_system(m),
        }
    }

    /// Same system on another grid; the grid must cover the natural domain's interior.
    pub fn with_grid(mut self, grid: Arc<Grid>) -> Result<ModelSystem> {
        let ok = match self.params {
            SystemParams::Coulomb { .. } => grid.points()[0] > 0.0,
            SystemParams::Oscillator { .. } => true,
            SystemParams::Trig => {
                grid.points()[0] > 0.0
                    && grid.points()[grid.len() - 1] < std::f64::consts::FRAC_PI_2
            }
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "grid leaves the domain of the {} system",
                self.name()
            )));
        }
        self.grid = grid;
        if matches!(self.params, SystemParams::Oscillator { .. }) {
            self.generator()?;
        }
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self.params {
            SystemParams::Coulomb { .. } => "coulomb",
            SystemParams::Oscillator { .. } => "oscillator",
            SystemParams::Trig => "trig",
        }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Endpoint kinds used by normalizability verdicts.
    pub fn ends(&self) -> (EndKind, EndKind) {
        match self.params {
            SystemParams::Coulomb { .. } => (EndKind::Finite, EndKind::Infinite),
            SystemParams::Oscillator { .. } => (EndKind::Infinite, EndKind::Infinite),
            SystemParams::Trig => (EndKind::Finite, EndKind::Finite),
        }
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self.params {
            SystemParams::Coulomb { ell } => coulomb::epsilon(ell, n),
            SystemParams::Oscillator { a, .. } => 2.0 * nf + 1.0 - a,
            SystemParams::Trig => (2.0 * nf + 5.0).powi(2),
        }
    }

    /// `|E_n|`.
    pub fn dirac_energy(&self, n: usize) -> f64 {
        energy_map(self.epsilon(n), 0.0, self.m)
            .map(|e| e.0)
            .unwrap_or(f64::NAN)
    }

    pub fn q0(&self) -> Result<SampledFunction> {
        match self.params {
            SystemParams::Coulomb { ell } => {
                Ok(SampledFunction::from_dual(self.grid.clone(), |x| {
                    coulomb::q0(ell, x)
                }))
            }
            SystemParams::Oscillator { a, c1, c2 } => oscillator::q0(&self.grid, a, c1, c2),
            SystemParams::Trig => Ok(SampledFunction::from_dual(self.grid.clone(), trig::q0)),
        }
    }

    /// The closed-form `U0`, independent of `q0`.
    pub fn u0(&self) -> SampledFunction {
        match self.params {
            SystemParams::Coulomb { ell } => {
                SampledFunction::from_dual(self.grid.clone(), |x| coulomb::u0(ell, x))
            }
            SystemParams::Oscillator { a, .. } => {
                SampledFunction::from_dual(self.grid.clone(), |x| x * x - a)
            }
            SystemParams::Trig => SampledFunction::from_dual(self.grid.clone(), trig::u0),
        }
    }

    pub fn potential(&self) -> Result<PseudoscalarPotential> {
        PseudoscalarPotential::new(self.m, self.q0()?, format!("{} q0", self.name()))
    }

    /// Upper component `Ψ1` of level `n`, with its exact second derivative.
    pub fn psi1(&self, n: usize) -> Result<SampledFunction> {
        let g = self.grid.clone();
        Ok(match self.params {
            SystemParams::Coulomb { ell } => {
                SampledFunction::from_dual(g, |x| coulomb::psi1(ell, n, x))
            }
            SystemParams::Oscillator { .. } => {
                SampledFunction::from_dual(g, |x| oscillator::psi1(n, x))
            }
            SystemParams::Trig => {
                trig::psi1(n, Dual2::var(1.0))?;
                SampledFunction::from_dual(g, |x| trig::psi1(n, x).expect("terminating series"))
            }
        })
    }

    /// Lower component `Ψ2` of level `n` at `E = |E_n|`, as printed for the
    /// Coulomb and trigonometric systems and from `q0` for the oscillator.
    pub fn psi2(&self, n: usize) -> Result<SampledFunction> {
        let g = self.grid.clone();
        let e = self.dirac_energy(n);
        let m = self.m;
        match self.params {
            SystemParams::Coulomb { ell } => Ok(SampledFunction::from_dual(g, |x| {
                coulomb::psi2(ell, n, e, m, x)
            })),
            SystemParams::Oscillator { .. } => {
                let q = self.q0()?;
                let p1 = self.psi1(n)?;
                let s = p1.second_derivative();
                let k = 1.0 / (e + m);
                let len = g.len();
                let val = (0..len)
                    .map(|i| k * (q.value(i) * p1.value(i) - p1.deriv(i)))
                    .collect();
                let der = (0..len)
                    .map(|i| k * (q.deriv(i) * p1.value(i) + q.value(i) * p1.deriv(i) - s[i]))
                    .collect();
                SampledFunction::new(g, val, der)
            }
            SystemParams::Trig => {
                trig::psi2(n, e, m, Dual2::var(1.0))?;
                Ok(SampledFunction::from_dual(g, |x| {
                    trig::psi2(n, e, m, x).expect("terminating series")
                }))
            }
        }
    }

    pub fn eigenspinor(&self, n: usize) -> Result<Spinor> {
        Spinor::new(self.dirac_energy(n), self.psi1(n)?, self.psi2(n)?, self.m)
    }

    /// The nodeless zero-energy solution `ψ` of `U0` with `q0 = ψ'/ψ`.
    pub fn generator(&self) -> Result<SampledFunction> {
        let g = self.grid.clone();
        match self.params {
            SystemParams::Coulomb { ell } => Ok(SampledFunction::from_dual(g, |x| {
                coulomb::generator(ell, x)
            })),
            SystemParams::Oscillator { a, c1, c2 } => oscillator::generator(&g, a, c1, c2),
            SystemParams::Trig => Ok(SampledFunction::from_dual(g, |x| x.tan() * x.tan())),
        }
    }
}

/// `q̂ = W(chain, ψ)/W(chain)` for the generator `ψ` at `ε = 0`; its
/// logarithmic derivative is the transformed `q1`. The generator grows at
/// singular ends, so the guarded quotient is used.
pub fn transformed_generator(sys: &ModelSystem, chain: &JordanChain) -> Result<SampledFunction> {
    transform_solution_guarded(chain, &sys.generator()?, 0.0)
}

#[cfg(test)]
mod tests;
