use serde::{Deserialize, Serialize};

use crate::breakdown::MovementBreakdown;
use crate::error::{ModelError, Result};
use crate::model::HierarchyTag;

/// Relative cost per bit moved, by hierarchy class.
///
/// An L2 access costs about six times an L1 access. The dedicated vertex
/// cache has no published figure and defaults to the L2 weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyWeights {
    pub w_l1: f64,
    pub w_l2: f64,
    pub w_cache: f64,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        EnergyWeights {
            w_l1: 1.0,
            w_l2: 6.0,
            w_cache: 6.0,
        }
    }
}

impl EnergyWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("w_l1", self.w_l1), ("w_l2", self.w_l2), ("w_cache", self.w_cache)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(ModelError::invalid(name, format!("{w} is not a positive weight")));
            }
        }
        Ok(())
    }

    pub fn weight(&self, tag: HierarchyTag) -> f64 {
        match tag {
            HierarchyTag::L1toL1 => self.w_l1,
            HierarchyTag::L2toL1 | HierarchyTag::L1toL2 => self.w_l2,
            HierarchyTag::CacheToL1 | HierarchyTag::L1toCache => self.w_cache,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCost {
    pub level: String,
    pub hierarchy: HierarchyTag,
    pub data_movement_bits: u128,
    pub weight: f64,
    pub cost: f64,
}

pub fn level_costs(breakdown: &MovementBreakdown, weights: &EnergyWeights) -> Vec<LevelCost> {
    breakdown
        .levels
        .iter()
        .map(|l| {
            let weight = weights.weight(l.hierarchy);
            LevelCost {
                level: l.label.clone(),
                hierarchy: l.hierarchy,
                data_movement_bits: l.data_movement_bits,
                weight,
                cost: l.data_movement_bits as f64 * weight,
            }
        })
        .collect()
}

/// Sum over levels of data movement times the level's hierarchy weight.
pub fn energy_estimate(breakdown: &MovementBreakdown, weights: &EnergyWeights) -> f64 {
    level_costs(breakdown, weights).iter().map(|c| c.cost).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breakdown::Accelerator;
    use crate::engn;
    use crate::model::{EngnConfig, TileParams, TransferMetrics};

    fn single(tag: HierarchyTag, bits: u128) -> MovementBreakdown {
        let level = TransferMetrics::closed_form("x", tag, bits, 1).unwrap();
        MovementBreakdown::new(Accelerator::Engn, vec![level]).unwrap()
    }

    #[test]
    fn weights_by_hierarchy() {
        let w = EnergyWeights {
            w_l1: 1.0,
            ..Default::default()
        };
        assert_eq!(energy_estimate(&single(HierarchyTag::L1toL1, 100), &w), 100.0);
        assert_eq!(
            energy_estimate(&single(HierarchyTag::L2toL1, 100), &EnergyWeights::default()),
            600.0
        );
        assert_eq!(
            energy_estimate(&single(HierarchyTag::L1toCache, 10), &EnergyWeights::default()),
            60.0
        );
    }

    #[test]
    fn aggregate_dominates_weighted_cost() {
        let b = engn::evaluate(&TileParams::default(), &EngnConfig::with_array(16, 16)).unwrap();
        let costs = level_costs(&b, &EnergyWeights::default());
        let total: f64 = costs.iter().map(|c| c.cost).sum();
        let agg = costs.iter().find(|c| c.level == engn::AGGREGATE).unwrap().cost;
        assert!(agg > total / 2.0);
    }

    #[test]
    fn linear_in_weights() {
        let b = engn::evaluate(&TileParams::default(), &EngnConfig::default()).unwrap();
        let w = EnergyWeights::default();
        let doubled = EnergyWeights {
            w_l1: 2.0 * w.w_l1,
            w_l2: 2.0 * w.w_l2,
            w_cache: 2.0 * w.w_cache,
        };
        assert_eq!(energy_estimate(&b, &doubled), 2.0 * energy_estimate(&b, &w));
    }

    #[test]
    fn rejects_non_positive_weights() {
        assert!(EnergyWeights {
            w_l2: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(EnergyWeights {
            w_l1: f64::NAN,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(EnergyWeights::default().validate().is_ok());
    }
}
