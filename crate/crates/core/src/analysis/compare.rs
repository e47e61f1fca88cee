use serde::Serialize;

use crate::breakdown::MovementBreakdown;
use crate::error::Result;
use crate::model::{EngnConfig, HygcnConfig, TileParams};
use crate::{engn, hygcn};

/// HyGCN over EnGN data movement for one level label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub level: String,
    pub engn_dm_bits: Option<u128>,
    pub hygcn_dm_bits: Option<u128>,
    /// `None` when the level is missing on either side or EnGN moves nothing.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub tile: TileParams,
    pub engn: MovementBreakdown,
    pub hygcn: MovementBreakdown,
    pub rows: Vec<RatioRow>,
    pub total: RatioRow,
}

impl Comparison {
    pub fn row(&self, level: &str) -> Option<&RatioRow> {
        self.rows.iter().find(|r| r.level == level)
    }
}

fn ratio(engn: Option<u128>, hygcn: Option<u128>) -> Option<f64> {
    match (engn, hygcn) {
        (Some(e), Some(h)) if e > 0 => Some(h as f64 / e as f64),
        _ => None,
    }
}

/// Both breakdowns for the same tile plus per-level and total ratios.
/// Rows follow EnGN's level order, then HyGCN-only levels.
pub fn compare(tile: &TileParams, engn_cfg: &EngnConfig, hygcn_cfg: &HygcnConfig) -> Result<Comparison> {
    let e = engn::evaluate(tile, engn_cfg)?;
    let h = hygcn::evaluate(tile, hygcn_cfg)?;
    let mut labels: Vec<&str> = e.labels().collect();
    labels.extend(h.labels().filter(|l| e.level(l).is_none()));
    let rows = labels
        .into_iter()
        .map(|label| {
            let engn_dm_bits = e.level(label).map(|l| l.data_movement_bits);
            let hygcn_dm_bits = h.level(label).map(|l| l.data_movement_bits);
            RatioRow {
                level: label.to_string(),
                engn_dm_bits,
                hygcn_dm_bits,
                ratio: ratio(engn_dm_bits, hygcn_dm_bits),
            }
        })
        .collect();
    let total = RatioRow {
        level: "total".to_string(),
        engn_dm_bits: Some(e.total_dm_bits),
        hygcn_dm_bits: Some(h.total_dm_bits),
        ratio: ratio(Some(e.total_dm_bits), Some(h.total_dm_bits)),
    };
    Ok(Comparison {
        tile: *tile,
        engn: e,
        hygcn: h,
        rows,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hygcn_moves_more_at_defaults() {
        let c = compare(&TileParams::default(), &EngnConfig::default(), &HygcnConfig::default()).unwrap();
        assert!(c.total.ratio.unwrap() > 1.0);
        assert_eq!(c.rows.len(), 10);
        // Inter-phase traffic exists only on HyGCN.
        let w = c.row(hygcn::WRITEINTERPHASE).unwrap();
        assert_eq!(w.engn_dm_bits, None);
        assert_eq!(w.ratio, None);
        // The vertex cache takes load off EnGN's loadvertL2. With a 128-row
        // array the chunk over-count happens to erase the difference.
        assert_eq!(c.row(engn::LOADVERTL2).unwrap().ratio, Some(1.0));
        let c = compare(
            &TileParams::default(),
            &EngnConfig::with_array(16, 16),
            &HygcnConfig::default(),
        )
        .unwrap();
        assert!(c.row(engn::LOADVERTL2).unwrap().ratio.unwrap() > 1.0);
    }

    #[test]
    fn empty_tile_ratios_are_undefined() {
        let c = compare(&TileParams::empty(), &EngnConfig::default(), &HygcnConfig::default()).unwrap();
        assert!(c.rows.iter().all(|r| r.ratio.is_none()));
        assert!(c.total.ratio.is_none());
    }

    #[test]
    fn cache_halves_loadvert_l2() {
        let mut tile = TileParams {
            high_degree_vertices: 0,
            ..TileParams::default()
        };
        let none = engn::loadvert_l2(&tile, &EngnConfig::default())
            .unwrap()
            .data_movement_bits;
        tile.high_degree_vertices = 500;
        let half = engn::loadvert_l2(&tile, &EngnConfig::default())
            .unwrap()
            .data_movement_bits;
        assert_eq!(none, 2 * half);
    }
}
