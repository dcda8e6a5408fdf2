//! `qmorph`: runs the numerical experiments of `qmorph-core` from JSON
//! configs and writes CSV tables and SVG plots.
//!
//! Exit codes: 0 success, 1 property violation, 2 oracle unavailable,
//! 3 configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use qmorph_core::homogenize::HomogenizeError;
use qmorph_core::spectral::SpectralError;
use qmorph_core::viterbo::ViterboError;
use thiserror::Error;

pub mod campaigns;
pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Oracle(String),
    #[error("property violated: {0}")]
    Violation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Oracle(_) => 2,
            CliError::Config(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::OracleUnavailable { .. } | SpectralError::Flow { .. } | SpectralError::Integrator(_) => {
                CliError::Oracle(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HomogenizeError> for CliError {
    fn from(e: HomogenizeError) -> Self {
        match e {
            HomogenizeError::Partial { n, source } => match CliError::from(source) {
                CliError::Oracle(m) => CliError::Oracle(format!("at n = {n}: {m}")),
                other => other,
            },
            HomogenizeError::Spectral(s) => s.into(),
            HomogenizeError::NotSubadditive { .. } => CliError::Violation(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ViterboError> for CliError {
    fn from(e: ViterboError) -> Self {
        match e {
            ViterboError::Spectral(s) => s.into(),
            ViterboError::Mismatch { .. } => CliError::Violation(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<qmorph_core::hamiltonian::HamiltonianError> for CliError {
    fn from(e: qmorph_core::hamiltonian::HamiltonianError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<qmorph_core::geometry::GeometryError> for CliError {
    fn from(e: qmorph_core::geometry::GeometryError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qmorph", version, about = "Conormal spectral invariant experiments on T*S^1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid: Option<i64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// ℓ₊ of the iterates and the homogenized value σ.
    Spectral,
    /// The sequences aₙ, bₙ, their properties and limsup estimates.
    Homogenize,
    /// Hold/increment sequence with two accumulation points.
    Counterexample,
    /// Randomized axiom campaigns and conjugation smoke tests.
    Axioms,
    /// Exact dimension formulas and the gluing identity.
    Dimension,
    /// Homogenized invariant against base rescaling.
    Viterbo,
    /// Every experiment with a pass/fail summary.
    Report,
}

/// What a finished command found.
#[derive(Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub violations: Vec<String>,
    /// Named headline numbers, read back by `report`.
    pub metrics: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn violate(&mut self, what: impl Into<String>) {
        self.violations.push(what.into());
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }
}

impl Cli {
    /// The config file merged with flag overrides.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.n_max.is_some() {
            cfg.n_max = self.n_max;
        }
        if self.grid.is_some() {
            cfg.grid = self.grid;
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Spectral => commands::spectral(cfg),
        Command::Homogenize => commands::homogenize(cfg),
        Command::Counterexample => commands::counterexample(cfg),
        Command::Axioms => commands::axioms(cfg),
        Command::Dimension => commands::dimension(cfg),
        Command::Viterbo => commands::viterbo(cfg),
        Command::Report => commands::report(cfg),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    let result = cli.resolve().and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(outcome) => {
            for l in &outcome.lines {
                println!("{l}");
            }
            for v in &outcome.violations {
                eprintln!("violation: {v}");
            }
            if outcome.violations.is_empty() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("qmorph: {e}");
            e.exit_code()
        }
    }
}
