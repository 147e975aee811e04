//! The `susy` command line: `spectrum`, `transform` and `verify`, each
//! driven by a [`RunConfig`] read from `--config` and overridden by flags.
//!
//! Exit codes: 0 success, 2 configuration error, 3 regularity failure,
//! 4 invariant failure, 1 any other error.

mod config;
mod pipeline;
mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use config::{Artifact, Overrides, RunConfig, SystemName, Tolerances, TransformConfig};
pub use pipeline::{levels, system, transform, window, Outcome, SpinorSummary, TransformedState};
pub use verify::{verify, Check, VerifyReport};

use crate::spectral::{DiffReport, RegularityReport, SpectrumReport};
use crate::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_REGULARITY: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "susy",
    version,
    about = "Confluent SUSY transformations of 1-D Dirac equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound-state spectrum of the untransformed system.
    Spectrum(Overrides),
    /// Transform, then write curves and a report.
    Transform(Overrides),
    /// Run the invariant checks and write a pass/fail report.
    Verify(Overrides),
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::InvalidInterval { .. }
            | Error::InvalidMargin { .. }
            | Error::TooFewPoints { .. }
            | Error::GammaPole(_)
            | Error::NoRealEnergy(_)
            | Error::EnergyAtMinusMass => EXIT_CONFIG,
            Error::SingularPotential { .. }
            | Error::SingularChain { .. }
            | Error::SingularQ { .. }
            | Error::FamilySingularity { .. }
            | Error::InadmissibleB { .. }
            | Error::NodalGenerator { .. } => EXIT_REGULARITY,
            _ => EXIT_OTHER,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_OTHER, format!("{}: {e}", path.display()))
}

/// Pretty JSON with a trailing newline; field order follows the struct definitions.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `x,value` rows with 16 significant digits.
pub fn curve_csv(x: &[f64], y: &[f64]) -> String {
    let mut s = String::from("x,value\n");
    for (a, b) in x.iter().zip(y) {
        let _ = writeln!(s, "{a:.15e},{b:.15e}");
    }
    s
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

/// Runs one command. Returns the exit code; messages go to stderr, and
/// reports to stdout or the output directory.
pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Spectrum(o) => RunConfig::resolve(o)
            .map_err(Failure::from)
            .and_then(|c| cmd_spectrum(&c, o.out.is_some())),
        Command::Transform(o) => RunConfig::resolve(o)
            .map_err(Failure::from)
            .and_then(|c| cmd_transform(&c)),
        Command::Verify(o) => RunConfig::resolve(o)
            .map_err(Failure::from)
            .and_then(|c| cmd_verify(&c)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Writes `spectrum.json` to the output directory when `to_dir`, else prints it.
pub fn cmd_spectrum(cfg: &RunConfig, to_dir: bool) -> Result<(), Failure> {
    let sys = pipeline::system(cfg)?;
    let report = spectrum_report(cfg, &sys)?;
    let text = to_json(&report);
    if to_dir {
        write(Path::new(&cfg.output_dir), "spectrum.json", &text)?;
    } else {
        print!("{text}");
    }
    Ok(())
}

/// Bound states of the untransformed system in the configured window.
pub fn spectrum_report(
    cfg: &RunConfig,
    sys: &crate::catalog::ModelSystem,
) -> crate::Result<SpectrumReport> {
    let w = pipeline::window(cfg, sys, None);
    pipeline::spectrum(cfg, sys, &sys.u0(), w, sys.name())
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformReport {
    pub config: RunConfig,
    pub system: String,
    pub order: usize,
    pub lambda: f64,
    pub regularity: RegularityReport,
    pub missing_state_normalizable: Option<bool>,
    pub riccati_residual: Option<f64>,
    pub spectrum_before: Option<SpectrumReport>,
    pub spectrum_after: Option<SpectrumReport>,
    pub spectrum_diff: Option<DiffReport>,
    pub spinors: Vec<SpinorSummary>,
    pub files: Vec<String>,
}

pub fn cmd_transform(cfg: &RunConfig) -> Result<(), Failure> {
    let dir = PathBuf::from(&cfg.output_dir);
    let sys = pipeline::system(cfg)?;
    let out = pipeline::transform(cfg, sys)?;
    let mut report = TransformReport {
        config: cfg.clone(),
        system: out.sys.name().into(),
        order: out.tr.chain.order(),
        lambda: out.lambda,
        regularity: out.regularity.clone(),
        missing_state_normalizable: out.missing_normalizable,
        riccati_residual: None,
        spectrum_before: None,
        spectrum_after: None,
        spectrum_diff: None,
        spinors: Vec::new(),
        files: Vec::new(),
    };
    let wants = |a: Artifact| cfg.outputs.contains(&a);
    if !out.regularity.regular && !cfg.transform.allow_singular {
        write(&dir, Artifact::Report.file_name(), &to_json(&report))?;
        print!("{}", to_json(&report.regularity));
        return Err(Failure::new(
            EXIT_REGULARITY,
            "singular transformation; rerun with --allow-singular to write it anyway",
        ));
    }
    let x = out.sys.grid().points();
    let mut curves: Vec<(Artifact, Vec<f64>)> = vec![
        (Artifact::U0, out.tr.u0.values().to_vec()),
        (Artifact::U1, out.tr.u1.values().to_vec()),
        (Artifact::Wronskian, out.tr.wron.w.values().to_vec()),
    ];
    if wants(Artifact::Q0) {
        curves.push((Artifact::Q0, out.sys.q0()?.values().to_vec()));
    }
    if let Some(q1) = &out.q1 {
        report.riccati_residual = Some(crate::dirac::riccati_residual(q1, &out.tr.u1));
        curves.push((Artifact::Q1, q1.values().to_vec()));
    }
    for (a, y) in curves {
        if wants(a) {
            write(&dir, a.file_name(), &curve_csv(x, &y))?;
            report.files.push(a.file_name().into());
        }
    }
    if out.regularity.regular {
        let (before, after, diff) = out.spectra(cfg)?;
        report.spectrum_before = Some(before);
        report.spectrum_after = Some(after);
        report.spectrum_diff = Some(diff);
        let states = out.states(cfg)?;
        report.spinors = states.iter().map(|s| s.summary()).collect();
        if wants(Artifact::Spinors) {
            write(&dir, Artifact::Spinors.file_name(), &spinor_csv(x, &states))?;
            report.files.push(Artifact::Spinors.file_name().into());
        }
    }
    if wants(Artifact::Report) {
        report.files.push(Artifact::Report.file_name().into());
        write(&dir, Artifact::Report.file_name(), &to_json(&report))?;
    }
    Ok(())
}

/// Long format: `level,component,x,value`, with level `inserted` for the
/// state created at `λ` and components `psi1`, `psi2`, `density`.
fn spinor_csv(x: &[f64], states: &[pipeline::TransformedState]) -> String {
    let mut s = String::from("level,component,x,value\n");
    for st in states {
        let level = st.level.map_or("inserted".to_string(), |n| n.to_string());
        let density = st.spinor.density();
        for (name, y) in [
            ("psi1", st.spinor.psi1.values()),
            ("psi2", st.spinor.psi2.values()),
            ("density", &density[..]),
        ] {
            for (a, b) in x.iter().zip(y) {
                let _ = writeln!(s, "{level},{name},{a:.15e},{b:.15e}");
            }
        }
    }
    s
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(), Failure> {
    let report = verify::verify(cfg)?;
    let text = to_json(&report);
    write(
        Path::new(&cfg.output_dir),
        Artifact::Report.file_name(),
        &text,
    )?;
    print!("{text}");
    if report.passed {
        Ok(())
    } else if !report.regular {
        Err(Failure::new(EXIT_REGULARITY, "transformation is singular"))
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(Failure::new(
            EXIT_INVARIANT,
            format!("failed checks: {}", failed.join(", ")),
        ))
    }
}
