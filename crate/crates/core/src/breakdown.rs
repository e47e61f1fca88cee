use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::TransferMetrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accelerator {
    Engn,
    Hygcn,
}

impl Accelerator {
    pub fn name(self) -> &'static str {
        match self {
            Accelerator::Engn => "engn",
            Accelerator::Hygcn => "hygcn",
        }
    }
}

impl std::fmt::Display for Accelerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Accelerator {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "engn" => Ok(Accelerator::Engn),
            "hygcn" => Ok(Accelerator::Hygcn),
            _ => Err(ModelError::invalid(
                "accelerator",
                format!("`{s}` is not one of engn, hygcn"),
            )),
        }
    }
}

/// Ordered per-level costs for one tile on one accelerator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovementBreakdown {
    pub accelerator: Accelerator,
    pub levels: Vec<TransferMetrics>,
    pub total_dm_bits: u128,
    pub total_iterations: u128,
    pub total_payload_bits: u128,
}

impl MovementBreakdown {
    pub fn new(accelerator: Accelerator, levels: Vec<TransferMetrics>) -> Result<Self> {
        for (i, level) in levels.iter().enumerate() {
            if levels[..i].iter().any(|l| l.label == level.label) {
                return Err(ModelError::ModelViolation(format!(
                    "duplicate movement level `{}`",
                    level.label
                )));
            }
        }
        let sum = |f: fn(&TransferMetrics) -> u128, what: &str| {
            levels
                .iter()
                .try_fold(0u128, |acc, l| acc.checked_add(f(l)))
                .ok_or_else(|| ModelError::Overflow(what.to_string()))
        };
        Ok(MovementBreakdown {
            accelerator,
            total_dm_bits: sum(|l| l.data_movement_bits, "total data movement")?,
            total_iterations: sum(|l| l.iterations, "total iterations")?,
            total_payload_bits: sum(|l| l.payload_bits, "total payload")?,
            levels,
        })
    }

    pub fn level(&self, label: &str) -> Option<&TransferMetrics> {
        self.levels.iter().find(|l| l.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.levels.iter().map(|l| l.label.as_str())
    }

    /// Largest single-level iteration count: the total when every level
    /// overlaps perfectly.
    pub fn max_level_iterations(&self) -> u128 {
        self.levels.iter().map(|l| l.iterations).max().unwrap_or(0)
    }

    pub fn totals_consistent(&self) -> bool {
        let dm: u128 = self.levels.iter().map(|l| l.data_movement_bits).sum();
        let it: u128 = self.levels.iter().map(|l| l.iterations).sum();
        let pl: u128 = self.levels.iter().map(|l| l.payload_bits).sum();
        dm == self.total_dm_bits && it == self.total_iterations && pl == self.total_payload_bits
    }
}
