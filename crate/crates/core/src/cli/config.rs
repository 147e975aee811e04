use std::path::Path;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::catalog::SystemParams;
use crate::numerics::GridSpec;
use crate::spectral::DEFAULT_TAU_SHOOT;
use crate::susy_core::wronskian::DEFAULT_TAU_NODE;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    pub m: f64,
    /// Bound states used for spectra and spinors; `None` takes the system default.
    pub levels: Option<usize>,
    /// Replaces the catalog grid.
    pub grid: Option<GridSpec>,
    pub transform: TransformConfig,
    pub tolerances: Tolerances,
    /// Search window for the untransformed spectrum; the transformed one is shifted by `C`.
    pub window: Option<(f64, f64)>,
    pub outputs: Vec<Artifact>,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: SystemParams::Coulomb { ell: 1 },
            m: 1.0,
            levels: None,
            grid: None,
            transform: TransformConfig::default(),
            tolerances: Tolerances::default(),
            window: None,
            outputs: Artifact::value_variants()
                .iter()
                .copied()
                .filter(|a| a.default_on())
                .collect(),
            output_dir: ".".into(),
        }
    }
}

/// Free constants of the transformation. Which ones apply depends on the
/// system: Coulomb deletes level `n0` with `w0`, the oscillator inserts
/// `lambda` with `b`, the trigonometric system runs the third-order chain at
/// its ground level with `inner_constants`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    /// Checked against the system's chain order when given.
    pub order: Option<usize>,
    pub n0: usize,
    pub w0: f64,
    /// Factorization energy; only free for the oscillator.
    pub lambda: Option<f64>,
    pub b: f64,
    /// Shift `C` of the transformed spectrum.
    pub shift: f64,
    /// Riccati family parameter; `None` takes the particular solution.
    pub c: Option<f64>,
    /// Multiple of the partner solution `v0` used as `û` (Coulomb and trig chains).
    pub u_hat: f64,
    /// Trig inner constants `c_1, c_2`; `None` takes `0, 1/20`.
    pub inner_constants: Option<Vec<f64>>,
    pub allow_singular: bool,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            order: None,
            n0: 0,
            w0: 0.0,
            lambda: None,
            b: -0.01,
            shift: 0.0,
            c: None,
            u_hat: 0.0,
            inner_constants: None,
            allow_singular: false,
        }
    }
}

pub const DEFAULT_OSCILLATOR_LAMBDA: f64 = 9.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tau_ode: f64,
    pub tau_transform: f64,
    pub tau_shoot: f64,
    pub tau_node: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_ode: 1e-8,
            tau_transform: 1e-6,
            tau_shoot: DEFAULT_TAU_SHOOT,
            tau_node: DEFAULT_TAU_NODE,
        }
    }
}

impl Tolerances {
    fn scaled(self, k: f64) -> Self {
        Tolerances {
            tau_ode: self.tau_ode * k,
            tau_transform: self.tau_transform * k,
            tau_shoot: self.tau_shoot * k,
            tau_node: self.tau_node * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    #[serde(rename = "U0")]
    #[value(name = "U0")]
    U0,
    #[serde(rename = "U1")]
    #[value(name = "U1")]
    U1,
    Q0,
    Q1,
    Wronskian,
    Spinors,
    Report,
}

impl Artifact {
    fn default_on(self) -> bool {
        !matches!(self, Artifact::U0 | Artifact::Q0)
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Artifact::U0 => "U0.csv",
            Artifact::U1 => "U1.csv",
            Artifact::Q0 => "q0.csv",
            Artifact::Q1 => "q1.csv",
            Artifact::Wronskian => "wronskian.csv",
            Artifact::Spinors => "spinors.csv",
            Artifact::Report => "report.json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemName {
    Coulomb,
    Oscillator,
    Trig,
}

/// Command-line overrides; every config field has one.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Model system.
    #[arg(long, value_enum)]
    pub system: Option<SystemName>,
    /// Coulomb angular momentum `ℓ ≥ 1`.
    #[arg(long)]
    pub ell: Option<u32>,
    /// Oscillator constant `A` in `U0 = x² − A`.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Oscillator weight of the even zero-energy solution generating `q0`.
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    /// Oscillator weight of the odd zero-energy solution generating `q0`.
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    /// Dirac mass.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Number of bound states in spectra and spinor output.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Left end of the grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_a: Option<f64>,
    /// Right end of the grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_b: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Distance kept from an open (singular) end.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_margin: Option<f64>,
    /// Left end is singular and excluded.
    #[arg(long)]
    pub open_left: Option<bool>,
    /// Right end is singular and excluded.
    #[arg(long)]
    pub open_right: Option<bool>,
    /// Transformation order; must match the system (2, or 3 for trig).
    #[arg(long)]
    pub order: Option<usize>,
    /// Coulomb level whose energy is the factorization energy.
    #[arg(long)]
    pub n0: Option<usize>,
    /// Coulomb Wronskian constant `W(0)`.
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<f64>,
    /// Oscillator factorization energy.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Oscillator Wronskian constant `B`.
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Spectral shift `C`.
    #[arg(long = "C", allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Riccati family parameter `c`.
    #[arg(long = "c", allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Multiple of the partner solution added to the top chain member.
    #[arg(long, allow_hyphen_values = true)]
    pub u_hat: Option<f64>,
    /// Trig chain constants, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub inner_constants: Option<Vec<f64>>,
    /// Write outputs even when the transformation is singular.
    #[arg(long)]
    pub allow_singular: bool,
    /// ODE residual tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_ode: Option<f64>,
    /// Transformation identity tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_transform: Option<f64>,
    /// Eigenvalue bisection tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_shoot: Option<f64>,
    /// Relative threshold for treating a Wronskian sample as a zero.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_node: Option<f64>,
    /// Multiplies every tolerance after the individual overrides.
    #[arg(long, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,
    /// Lower end of the spectrum search window.
    #[arg(long, allow_hyphen_values = true)]
    pub window_min: Option<f64>,
    /// Upper end of the spectrum search window.
    #[arg(long, allow_hyphen_values = true)]
    pub window_max: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub outputs: Option<Vec<Artifact>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    /// Parses and validates a JSON config.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The config file (or defaults) with every given flag applied, validated.
    pub fn resolve(o: &Overrides) -> Result<RunConfig> {
        let mut cfg = match &o.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(o)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) -> Result<()> {
        let name = o.system.unwrap_or(match self.system {
            SystemParams::Coulomb { .. } => SystemName::Coulomb,
            SystemParams::Oscillator { .. } => SystemName::Oscillator,
            SystemParams::Trig => SystemName::Trig,
        });
        self.system = match (name, &self.system) {
            (SystemName::Coulomb, SystemParams::Coulomb { ell }) => SystemParams::Coulomb {
                ell: o.ell.unwrap_or(*ell),
            },
            (SystemName::Coulomb, _) => SystemParams::Coulomb {
                ell: o.ell.unwrap_or(1),
            },
            (SystemName::Oscillator, SystemParams::Oscillator { a, c1, c2 }) => {
                SystemParams::Oscillator {
                    a: o.a.unwrap_or(*a),
                    c1: o.c1.unwrap_or(*c1),
                    c2: o.c2.unwrap_or(*c2),
                }
            }
            (SystemName::Oscillator, _) => SystemParams::Oscillator {
                a: o.a.unwrap_or(-5.0),
                c1: o.c1.unwrap_or(1.0),
                c2: o.c2.unwrap_or(0.0),
            },
            (SystemName::Trig, _) => SystemParams::Trig,
        };
        set(&mut self.m, o.m);
        if o.levels.is_some() {
            self.levels = o.levels;
        }
        let grid_flags = o.grid_a.is_some()
            || o.grid_b.is_some()
            || o.grid_points.is_some()
            || o.grid_margin.is_some()
            || o.open_left.is_some()
            || o.open_right.is_some();
        if grid_flags {
            let base = match &self.grid {
                Some(g) => g.clone(),
                None => crate::catalog::ModelSystem::from_params(&self.system, self.m)?
                    .grid()
                    .spec(),
            };
            self.grid = Some(GridSpec {
                a: o.grid_a.unwrap_or(base.a),
                b: o.grid_b.unwrap_or(base.b),
                n_points: o.grid_points.unwrap_or(base.n_points),
                open_left: o.open_left.unwrap_or(base.open_left),
                open_right: o.open_right.unwrap_or(base.open_right),
                margin: o.grid_margin.or(base.margin),
            });
        }
        let t = &mut self.transform;
        if o.order.is_some() {
            t.order = o.order;
        }
        set(&mut t.n0, o.n0);
        set(&mut t.w0, o.w0);
        if o.lambda.is_some() {
            t.lambda = o.lambda;
        }
        set(&mut t.b, o.b);
        set(&mut t.shift, o.shift);
        if o.c.is_some() {
            t.c = o.c;
        }
        set(&mut t.u_hat, o.u_hat);
        if o.inner_constants.is_some() {
            t.inner_constants = o.inner_constants.clone();
        }
        t.allow_singular |= o.allow_singular;
        let tol = &mut self.tolerances;
        set(&mut tol.tau_ode, o.tau_ode);
        set(&mut tol.tau_transform, o.tau_transform);
        set(&mut tol.tau_shoot, o.tau_shoot);
        set(&mut tol.tau_node, o.tau_node);
        if let Some(k) = o.tolerance {
            if !(k > 0.0 && k.is_finite()) {
                return Err(config_error(format!(
                    "tolerance factor must be positive, got {k}"
                )));
            }
            self.tolerances = self.tolerances.scaled(k);
        }
        match (o.window_min, o.window_max, self.window) {
            (None, None, _) => {}
            (Some(lo), Some(hi), _) => self.window = Some((lo, hi)),
            (lo, hi, Some((a, b))) => self.window = Some((lo.unwrap_or(a), hi.unwrap_or(b))),
            _ => {
                return Err(config_error(
                    "--window-min and --window-max must be given together",
                ))
            }
        }
        if let Some(out) = &o.outputs {
            self.outputs = out.clone();
        }
        if let Some(dir) = &o.out {
            self.output_dir = dir.clone();
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let tol = &self.tolerances;
        for (name, v) in [
            ("tau_ode", tol.tau_ode),
            ("tau_transform", tol.tau_transform),
            ("tau_shoot", tol.tau_shoot),
            ("tau_node", tol.tau_node),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_error(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.m.is_finite() {
            return Err(config_error(format!("m must be finite, got {}", self.m)));
        }
        if self.levels == Some(0) {
            return Err(config_error("levels must be at least 1"));
        }
        if let SystemParams::Coulomb { ell: 0 } = self.system {
            return Err(config_error("ell must be at least 1"));
        }
        if let Some((lo, hi)) = self.window {
            if !(lo < hi) {
                return Err(config_error(format!("empty window ({lo}, {hi})")));
            }
        }
        let expected = match self.system {
            SystemParams::Trig => 3,
            _ => 2,
        };
        if let Some(order) = self.transform.order {
            if order != expected {
                return Err(config_error(format!(
                    "this system's transformation has order {expected}, not {order}"
                )));
            }
        }
        if self.transform.lambda.is_some()
            && !matches!(self.system, SystemParams::Oscillator { .. })
        {
            return Err(config_error(
                "lambda is only free for the oscillator; use n0 for Coulomb",
            ));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        match self.system {
            SystemParams::Trig => 3,
            _ => 2,
        }
    }
}

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
