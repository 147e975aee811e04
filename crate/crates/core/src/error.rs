use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: a = {a} must be smaller than b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("margin {margin} must lie in (0, {limit})")]
    InvalidMargin { margin: f64, limit: f64 },
    #[error("grid needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("solution exceeded {cap:e} at x = {x}")]
    BlowUp { x: f64, cap: f64 },
    #[error("non-finite coefficient at x = {x}")]
    NonFiniteCoefficient { x: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Gamma function pole at x = {0}")]
    GammaPole(f64),
    #[error("1F1({a}, {b}, {x}) did not converge within {terms} terms")]
    NonConvergence {
        a: f64,
        b: f64,
        x: f64,
        terms: usize,
    },
    #[error("u0 vanishes at the interior point x = {x}")]
    SingularChain { x: f64 },
    #[error("missing ODE relation: {0}")]
    MissingOdeContext(String),
    #[error("Wronskian vanishes inside the domain near x = {locations:?}")]
    SingularPotential { locations: Vec<f64> },
    #[error("chain residual {residual:e} exceeds tolerance {tolerance:e}")]
    ChainResidual { residual: f64, tolerance: f64 },
    #[error("no real energy: eps + C + m^2 = {0} < 0")]
    NoRealEnergy(f64),
    #[error("E = -m is excluded")]
    EnergyAtMinusMass,
    #[error("zero-energy solution has interior nodes near x = {locations:?}")]
    SingularQ { locations: Vec<f64> },
    #[error("c + I(x) vanishes near x = {x}; admissible c: {admissible}")]
    FamilySingularity { x: f64, admissible: String },
    #[error("B = {b} is inadmissible: Wronskian vanishes near x = {x}; admissible: {admissible}")]
    InadmissibleB { b: f64, x: f64, admissible: String },
    #[error(
        "q0 construction failed: the zero-energy solution has real nodes near x = {locations:?}"
    )]
    NodalGenerator { locations: Vec<f64> },
    #[error("endpoint fit failed: {0}")]
    Fit(String),
    #[error("configuration error: {0}")]
    Config(String),
}
