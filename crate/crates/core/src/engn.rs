//! EnGN data-movement model.
//!
//! A single `M x M'` PE array runs aggregation and combination back to back.
//! Vertex features stream in from L2 and from a dedicated cache for
//! high-degree vertices, aggregation circulates partial results around the
//! ring-edge-reduce (RER) ring, and results are written back to both the
//! cache and L2.

use crate::breakdown::{Accelerator, MovementBreakdown};
use crate::error::Result;
use crate::model::{bounded_transfer, ceil_div, mul, EngnConfig, HierarchyTag, TileParams, TransferMetrics};

pub const LOADVERTCACHE: &str = "loadvertcache";
pub const LOADVERTL2: &str = "loadvertL2";
pub const LOADEDGES: &str = "loadedges";
pub const LOADWEIGHTS: &str = "loadweights";
pub const AGGREGATE: &str = "aggregate";
pub const WRITECACHE: &str = "writecache";
pub const WRITEL2: &str = "writeL2";

/// Movement levels in evaluation order.
pub const LEVELS: [&str; 7] = [
    LOADVERTCACHE,
    LOADVERTL2,
    LOADEDGES,
    LOADWEIGHTS,
    AGGREGATE,
    WRITECACHE,
    WRITEL2,
];

fn sigma(cfg: &EngnConfig) -> u128 {
    cfg.common.precision_bits as u128
}

fn row_bits(cfg: &EngnConfig) -> Result<u128> {
    mul(cfg.pe_rows as u128, sigma(cfg), "M*sigma")
}

fn elems(count: u64, cfg: &EngnConfig, what: &str) -> Result<u128> {
    mul(count as u128, sigma(cfg), what)
}

pub fn loadvertcache(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    let total = elems(tile.high_degree_vertices, cfg, LOADVERTCACHE)?;
    let caps = [cfg.effective_cache_bandwidth() as u128, row_bits(cfg)?];
    let t = bounded_transfer(total, &caps, tile.in_features)?;
    Ok(TransferMetrics::from_transfer(
        LOADVERTCACHE,
        HierarchyTag::CacheToL1,
        t,
    ))
}

pub fn loadvert_l2(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    tile.validate()?;
    let total = elems(tile.low_degree_vertices(), cfg, LOADVERTL2)?;
    let caps = [cfg.common.bandwidth as u128, row_bits(cfg)?];
    let t = bounded_transfer(total, &caps, tile.in_features)?;
    Ok(TransferMetrics::from_transfer(LOADVERTL2, HierarchyTag::L2toL1, t))
}

pub fn loadedges(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    let total = elems(tile.edges, cfg, LOADEDGES)?;
    let t = bounded_transfer(total, &[cfg.common.bandwidth as u128], 1)?;
    Ok(TransferMetrics::from_transfer(LOADEDGES, HierarchyTag::L2toL1, t))
}

/// The tile needs `N x T` weights: `T` per row streamed `N` times.
pub fn loadweights(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    let total = elems(tile.out_features, cfg, LOADWEIGHTS)?;
    let caps = [cfg.common.bandwidth as u128, row_bits(cfg)?];
    let t = bounded_transfer(total, &caps, tile.in_features)?;
    Ok(TransferMetrics::from_transfer(LOADWEIGHTS, HierarchyTag::L2toL1, t))
}

/// Ring traffic of the RER aggregation: each pass moves `M(M-1)T` elements.
///
/// Passes are `ceil(K/M) + ceil(K(N-M)/M)`. The second term goes negative
/// once the array is wider than the feature vector and is clamped to zero.
pub fn aggregate(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    let m = cfg.pe_rows as u128;
    let k = tile.vertices as u128;
    let n = tile.in_features as u128;
    let mut passes = ceil_div(k, m)?;
    if n > m {
        passes += ceil_div(mul(k, n - m, AGGREGATE)?, m)?;
    }
    let ring = mul(m, m - 1, AGGREGATE)?;
    let chunk = mul(mul(ring, tile.out_features as u128, AGGREGATE)?, sigma(cfg), AGGREGATE)?;
    TransferMetrics::closed_form(AGGREGATE, HierarchyTag::L1toL1, chunk, passes)
}

/// Written to the vertex cache. The model table prints this hierarchy as
/// `L1--L2`; that notation is kept for output while the tag records the
/// cache destination.
pub fn writecache(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    let total = elems(tile.high_degree_vertices, cfg, WRITECACHE)?;
    let caps = [row_bits(cfg)?, cfg.effective_cache_bandwidth() as u128];
    let t = bounded_transfer(total, &caps, tile.out_features)?;
    Ok(TransferMetrics::from_transfer(WRITECACHE, HierarchyTag::L1toCache, t)
        .with_table_hierarchy(HierarchyTag::L1toL2.notation()))
}

pub fn write_l2(tile: &TileParams, cfg: &EngnConfig) -> Result<TransferMetrics> {
    tile.validate()?;
    let total = elems(tile.low_degree_vertices(), cfg, WRITEL2)?;
    let caps = [row_bits(cfg)?, cfg.common.bandwidth as u128];
    let t = bounded_transfer(total, &caps, tile.out_features)?;
    Ok(TransferMetrics::from_transfer(WRITEL2, HierarchyTag::L1toL2, t))
}

pub fn evaluate(tile: &TileParams, cfg: &EngnConfig) -> Result<MovementBreakdown> {
    tile.validate()?;
    cfg.validate()?;
    let levels = vec![
        loadvertcache(tile, cfg)?,
        loadvert_l2(tile, cfg)?,
        loadedges(tile, cfg)?,
        loadweights(tile, cfg)?,
        aggregate(tile, cfg)?,
        writecache(tile, cfg)?,
        write_l2(tile, cfg)?,
    ];
    MovementBreakdown::new(Accelerator::Engn, levels)
}
