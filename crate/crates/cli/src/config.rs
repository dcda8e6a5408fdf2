//! Experiment configuration: a strict JSON record, overridable from flags.

use std::path::{Path, PathBuf};

use qmorph_core::hamiltonian::{HamiltonianSpec, TrigPoly};
use qmorph_core::ConormalTarget;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every field is optional; each subcommand fills gaps with its own defaults
/// and ignores fields it has no use for.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<ConormalTarget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Signed so that a negative value is reported instead of failing to parse.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Trials per axiom clause, or random tuples for `dimension`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Random pairs for the triangle fuzz in `report`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    /// Random profiles for the cross-validation in `report`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profiles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_high: Option<f64>,
    /// Base function for `viterbo`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<TrigPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<GradingInput>,
}

/// Gradings for `dimension`, written as exact fractions such as `"-3/2"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradingInput {
    pub mu1: String,
    pub mu2: String,
    pub mu_out: String,
    pub mu_x: String,
    pub mu_y: String,
    pub dim_m: i64,
    pub dim_n: i64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed.unwrap_or(default)
    }

    pub fn grid_or(&self, default: usize) -> Result<usize, CliError> {
        match self.grid {
            None => Ok(default),
            Some(g) if g > 0 => Ok(g as usize),
            Some(g) => Err(CliError::Config(format!("grid must be positive, got {g}"))),
        }
    }

    pub fn step_or(&self, default: f64) -> Result<f64, CliError> {
        positive("step", self.step.unwrap_or(default))
    }

    pub fn tol_or(&self, default: f64) -> Result<f64, CliError> {
        let tol = self.tol.unwrap_or(default);
        if tol >= 0.0 && tol.is_finite() {
            Ok(tol)
        } else {
            Err(CliError::Config(format!("tol must be non-negative, got {tol}")))
        }
    }

    pub fn n_max_or(&self, default: usize) -> Result<usize, CliError> {
        match self.n_max.unwrap_or(default) {
            0 => Err(CliError::Config("n_max must be positive".into())),
            n => Ok(n),
        }
    }

    pub fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig {
            hamiltonian: Some(HamiltonianSpec::lifted_safe(TrigPoly::cosine(), 4)),
            target: Some(ConormalTarget::point(0.5).unwrap()),
            n_max: Some(12),
            seed: Some(9),
            grid: Some(512),
            grading: Some(GradingInput {
                mu1: "1/2".into(),
                mu2: "0".into(),
                mu_out: "-3/2".into(),
                mu_x: "1".into(),
                mu_y: "0".into(),
                dim_m: 1,
                dim_n: 0,
            }),
            ..Default::default()
        };
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn strict() {
        assert!(ExperimentConfig::from_json(r#"{"n_max": 3, "colour": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"target": {"kind": "point", "x": 0.1, "y": 2}}"#).is_err());
        let neg = ExperimentConfig::from_json(r#"{"grid": -8}"#).unwrap();
        assert!(matches!(neg.grid_or(64), Err(CliError::Config(_))));
    }
}
