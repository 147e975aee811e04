//! Grids, sampled functions, ODE integration, quadrature and differentiation.

pub mod diff;
pub mod dual;
pub mod grid;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod sampled;

pub use diff::{differentiate, fd_derivative};
pub use dual::{Dual2, Scalar};
pub use grid::{build_grid, Anchor, Grid, GridSpec};
pub use ode::{solve_linear_ode2, OdeOptions};
pub use quad::{antiderivative, cumulative, integrate, integrate_all};
pub use sampled::{OdeContext, SampledFunction, SecondOrder};

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared across modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub ode: f64,
    pub fd: f64,
    pub transform: f64,
    pub shoot: f64,
    pub node: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode: 1e-8,
            fd: 1e-6,
            transform: 1e-6,
            shoot: 1e-8,
            node: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [self.ode, self.fd, self.transform, self.shoot, self.node];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(crate::Error::Config(format!(
                "tolerances must be positive: {self:?}"
            )))
        }
    }
}
