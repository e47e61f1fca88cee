//! HyGCN data-movement model.
//!
//! Separate aggregation (SIMD cores) and combination (systolic array)
//! engines, joined by an inter-phase buffer that aggregated features are
//! written to and read back from.

use crate::breakdown::{Accelerator, MovementBreakdown};
use crate::error::Result;
use crate::model::{add, bounded_transfer, mul, HierarchyTag, HygcnConfig, TileParams, TransferMetrics};

pub const LOADVERTL2: &str = "loadvertL2";
pub const LOADEDGES: &str = "loadedges";
pub const LOADWEIGHTS: &str = "loadweights";
pub const AGGREGATE: &str = "aggregate";
pub const WRITEINTERPHASE: &str = "writeinterphase";
pub const COMBINE: &str = "combine";
pub const READINTERPHASE: &str = "readinterphase";
pub const WRITEL2: &str = "writeL2";

pub const LEVELS: [&str; 8] = [
    LOADVERTL2,
    LOADEDGES,
    LOADWEIGHTS,
    AGGREGATE,
    WRITEINTERPHASE,
    COMBINE,
    READINTERPHASE,
    WRITEL2,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Aggregation,
    Combination,
}

/// Engine a movement level belongs to.
pub fn phase_of(label: &str) -> Option<Phase> {
    match label {
        LOADVERTL2 | LOADEDGES | AGGREGATE | WRITEINTERPHASE => Some(Phase::Aggregation),
        LOADWEIGHTS | READINTERPHASE | COMBINE | WRITEL2 => Some(Phase::Combination),
        _ => None,
    }
}

/// Iterations per engine, `(aggregation, combination)`. With the two
/// engines fully pipelined the tile takes the larger of the two.
pub fn phase_iterations(breakdown: &MovementBreakdown) -> (u128, u128) {
    breakdown
        .levels
        .iter()
        .fold((0, 0), |(a, c), l| match phase_of(&l.label) {
            Some(Phase::Aggregation) => (a + l.iterations, c),
            Some(Phase::Combination) => (a, c + l.iterations),
            None => (a, c),
        })
}

fn sigma(cfg: &HygcnConfig) -> u128 {
    cfg.common.precision_bits as u128
}

fn bandwidth(cfg: &HygcnConfig) -> u128 {
    cfg.common.bandwidth as u128
}

pub fn loadvert_l2(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let total = mul(tile.vertices as u128, sigma(cfg), LOADVERTL2)?;
    let caps = [
        bandwidth(cfg),
        mul(cfg.aggregation_pes as u128, sigma(cfg), "Ma*sigma")?,
    ];
    let t = bounded_transfer(total, &caps, tile.in_features)?;
    Ok(TransferMetrics::from_transfer(LOADVERTL2, HierarchyTag::L2toL1, t))
}

pub fn loadedges(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let total = mul(cfg.effective_sliding_edges(tile) as u128, sigma(cfg), LOADEDGES)?;
    let t = bounded_transfer(total, &[bandwidth(cfg)], 1)?;
    Ok(TransferMetrics::from_transfer(LOADEDGES, HierarchyTag::L2toL1, t))
}

/// Weights still loaded after systolic reuse: `N*T*sigma*(1-gamma)`, rounded
/// half-up to whole bits.
pub fn loadweights(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    cfg.validate()?;
    let full = mul(
        mul(tile.in_features as u128, tile.out_features as u128, LOADWEIGHTS)?,
        sigma(cfg),
        LOADWEIGHTS,
    )?;
    let total = cfg.systolic_reuse.complement_scale_round(full)?;
    let caps = [
        bandwidth(cfg),
        mul(cfg.combination_pes as u128, sigma(cfg), "Mc*sigma")?,
    ];
    let t = bounded_transfer(total, &caps, 1)?;
    Ok(TransferMetrics::from_transfer(LOADWEIGHTS, HierarchyTag::L2toL1, t))
}

/// Each SIMD core works on up to `simd_width` feature components per step.
pub fn aggregate(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let edges = cfg.effective_sliding_edges(tile) as u128;
    let total = mul(mul(tile.in_features as u128, edges, AGGREGATE)?, sigma(cfg), AGGREGATE)?;
    let lanes = mul(cfg.aggregation_pes as u128, cfg.simd_width as u128, "Ma*simd_width")?;
    let t = bounded_transfer(total, &[lanes], 1)?;
    Ok(TransferMetrics::from_transfer(AGGREGATE, HierarchyTag::L1toL1, t))
}

pub fn writeinterphase(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let total = aggregated_bits(tile, cfg)?;
    let t = bounded_transfer(total, &[bandwidth(cfg)], 1)?;
    Ok(TransferMetrics::from_transfer(WRITEINTERPHASE, HierarchyTag::L1toL2, t))
}

/// One step moving the aggregated features and the weights into the
/// systolic array.
pub fn combine(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let weights = mul(
        mul(tile.in_features as u128, tile.out_features as u128, COMBINE)?,
        sigma(cfg),
        COMBINE,
    )?;
    let dm = add(aggregated_bits(tile, cfg)?, weights, COMBINE)?;
    let iterations = if dm == 0 { 0 } else { 1 };
    TransferMetrics::closed_form(COMBINE, HierarchyTag::L1toL1, dm, iterations)
}

/// The buffer read is capped by `Mc` bits per iteration, or `Mc*sigma` bits
/// when `mc_cap_in_elements` is set.
pub fn readinterphase(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let edges = cfg.effective_sliding_edges(tile) as u128;
    let total = mul(
        mul(edges, tile.in_features as u128, READINTERPHASE)?,
        sigma(cfg),
        READINTERPHASE,
    )?;
    let mc_cap = if cfg.mc_cap_in_elements {
        mul(cfg.combination_pes as u128, sigma(cfg), "Mc*sigma")?
    } else {
        cfg.combination_pes as u128
    };
    let t = bounded_transfer(total, &[bandwidth(cfg), mc_cap], 1)?;
    Ok(TransferMetrics::from_transfer(READINTERPHASE, HierarchyTag::L2toL1, t))
}

pub fn write_l2(tile: &TileParams, cfg: &HygcnConfig) -> Result<TransferMetrics> {
    let total = mul(
        mul(tile.vertices as u128, tile.out_features as u128, WRITEL2)?,
        sigma(cfg),
        WRITEL2,
    )?;
    let t = bounded_transfer(total, &[bandwidth(cfg)], 1)?;
    Ok(TransferMetrics::from_transfer(WRITEL2, HierarchyTag::L1toL2, t))
}

fn aggregated_bits(tile: &TileParams, cfg: &HygcnConfig) -> Result<u128> {
    mul(
        mul(tile.vertices as u128, tile.in_features as u128, "K*N")?,
        sigma(cfg),
        "K*N*sigma",
    )
}

pub fn evaluate(tile: &TileParams, cfg: &HygcnConfig) -> Result<MovementBreakdown> {
    tile.validate()?;
    cfg.validate()?;
    let levels = vec![
        loadvert_l2(tile, cfg)?,
        loadedges(tile, cfg)?,
        loadweights(tile, cfg)?,
        aggregate(tile, cfg)?,
        writeinterphase(tile, cfg)?,
        combine(tile, cfg)?,
        readinterphase(tile, cfg)?,
        write_l2(tile, cfg)?,
    ];
    MovementBreakdown::new(Accelerator::Hygcn, levels)
}
