use serde::{Deserialize, Serialize};

use crate::error::{RelexError, Result};

/// Hyperparameters shared by both trainers.
///
/// Defaults: embedding dimension 50, margin 1, learning rate 0.001 for the
/// mention scorer and 0.1 for the KB scorer, calibration threshold 10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Embedding dimension k.
    pub dim: usize,
    /// Ranking margin of the hinge loss.
    pub margin: f64,
    /// SGD step size.
    pub learning_rate: f64,
    /// Passes over the training data.
    pub epochs: usize,
    /// Seed for the single per-run random generator.
    pub seed: u64,
    /// Rank-calibration threshold t: a relationship in the top t ranks
    /// counts as confirmed by the KB.
    pub calibration_threshold: usize,
}

impl ModelConfig {
    /// Defaults for the mention-to-relationship scorer.
    pub fn m2r_defaults() -> Self {
        ModelConfig {
            dim: 50,
            margin: 1.0,
            learning_rate: 0.001,
            epochs: 10,
            seed: 42,
            calibration_threshold: 10,
        }
    }

    /// Defaults for the KB scorer.
    pub fn kb_defaults() -> Self {
        ModelConfig {
            learning_rate: 0.1,
            ..Self::m2r_defaults()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(RelexError::InvalidArgument("dim must be >= 1".into()));
        }
        if !(self.margin > 0.0) || !self.margin.is_finite() {
            return Err(RelexError::InvalidArgument(
                "margin must be positive and finite".into(),
            ));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(RelexError::InvalidArgument(
                "learning_rate must be positive and finite".into(),
            ));
        }
        if self.calibration_threshold < 1 {
            return Err(RelexError::InvalidArgument(
                "calibration_threshold must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-epoch training statistics, one line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean hinge loss over the constraints sampled this epoch.
    pub mean_hinge: f64,
    /// Number of sampled constraints with a positive hinge.
    pub violations: usize,
}

impl EpochStats {
    /// Formats the stats as a training-log TSV line.
    pub fn tsv_line(&self) -> String {
        format!("{}\t{}\t{}", self.epoch, self.mean_hinge, self.violations)
    }
}
