//! The confluent transformation at the Schrödinger level.

pub mod asymptotics;
pub mod chain;
pub mod transform;
pub mod wronskian;

pub use asymptotics::{
    end_decay, frobenius_exponents, normalizability, pole_coefficient, singularity_exponent,
    EndDecay, EndKind, Normalizability,
};
pub use chain::{
    chain_from_lambda_derivative, chain_from_u0_integral, partner_solution_v0, BoundaryBehavior,
    IntegralOptions, JordanChain, LambdaDerivativeOptions,
};
pub use transform::{
    missing_state, schrodinger_residual, solution_energy, transform_potential, transform_solution,
    transform_solution_at, transform_solution_guarded, TransformOptions, TransformResult,
};
pub use wronskian::{chain_wronskian, scan_zeros, wronskian, wronskian_2nd_order, WronskianData};

#[cfg(test)]
mod tests;
