//! Step-level transfer simulator.
//!
//! Moves data one bandwidth-limited step at a time instead of using the
//! closed-form ceiling, so iteration counts and payloads can be checked
//! against the formula evaluation.

use rand::Rng;
use serde::Serialize;

use crate::breakdown::MovementBreakdown;
use crate::error::{ModelError, Result};
use crate::model::{CommonHwParams, Decimal, EngnConfig, HygcnConfig, TileParams, TransferMetrics};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferTrace {
    pub steps: Vec<u128>,
    pub total_moved: u128,
    pub step_count: u128,
}

/// Greedy step iterator: each step moves `min(remaining, narrowest cap)`.
#[derive(Debug, Clone)]
pub struct TransferSteps {
    remaining: u128,
    cap: u128,
}

impl TransferSteps {
    pub fn new(total_bits: u128, caps: &[u128]) -> Result<Self> {
        let cap = *caps.iter().min().ok_or(ModelError::EmptyCaps)?;
        if cap < 1 {
            return Err(ModelError::CapBelowOne(cap));
        }
        Ok(TransferSteps {
            remaining: total_bits,
            cap,
        })
    }
}

impl Iterator for TransferSteps {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        if self.remaining == 0 {
            return None;
        }
        let step = self.remaining.min(self.cap);
        self.remaining -= step;
        Some(step)
    }
}

pub fn simulate_transfer(total_bits: u128, caps: &[u128]) -> Result<TransferTrace> {
    let steps: Vec<u128> = TransferSteps::new(total_bits, caps)?.collect();
    Ok(TransferTrace {
        total_moved: steps.iter().sum(),
        step_count: steps.len() as u128,
        steps,
    })
}

/// Counts steps and moved bits without keeping the trace.
fn replay(total_bits: u128, caps: &[u128]) -> Result<(u128, u128)> {
    Ok(TransferSteps::new(total_bits, caps)?.fold((0, 0), |(n, moved), step| (n + 1, moved + step)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub level: String,
    pub issues: Vec<String>,
}

/// Replays every transfer level of `breakdown` through the step simulator.
///
/// Returns one report per level whose iteration count or payload disagrees
/// with the simulation, or (closed-form levels included) whose data
/// movement is not `chunk * multiplier * iterations`.
pub fn check_breakdown(breakdown: &MovementBreakdown) -> Vec<Discrepancy> {
    breakdown
        .levels
        .iter()
        .filter_map(|level| {
            let issues = level_issues(level);
            (!issues.is_empty()).then(|| Discrepancy {
                level: level.label.clone(),
                issues,
            })
        })
        .collect()
}

fn level_issues(level: &TransferMetrics) -> Vec<String> {
    let mut issues = Vec::new();
    if !level.identity_holds() {
        issues.push(format!(
            "data movement {} != chunk {} x multiplier {} x iterations {}",
            level.data_movement_bits, level.chunk_bits, level.multiplier, level.iterations
        ));
    }
    let Some(input) = &level.transfer else {
        return issues;
    };
    match replay(input.total_bits, &input.caps) {
        Err(e) => issues.push(format!("cannot simulate: {e}")),
        Ok((steps, moved)) => {
            if steps != level.iterations {
                issues.push(format!(
                    "simulated {steps} steps, formula reports {} iterations",
                    level.iterations
                ));
            }
            if moved.checked_mul(level.multiplier as u128) != Some(level.payload_bits) {
                issues.push(format!(
                    "simulated payload {moved} x {} != reported {}",
                    level.multiplier, level.payload_bits
                ));
            }
        }
    }
    issues
}

fn random_common<R: Rng>(rng: &mut R) -> CommonHwParams {
    CommonHwParams {
        precision_bits: [1, 2, 4, 8, 16, 32][rng.gen_range(0..6)],
        bandwidth: rng.gen_range(1..=20_000),
    }
}

/// Random tile within the ranges used by `validate --random`.
pub fn random_tile<R: Rng>(rng: &mut R) -> TileParams {
    let vertices = rng.gen_range(0..=3000);
    TileParams {
        vertices,
        high_degree_vertices: rng.gen_range(0..=vertices),
        edges: rng.gen_range(0..=30_000),
        in_features: rng.gen_range(0..=128),
        out_features: rng.gen_range(0..=64),
    }
}

pub fn random_engn<R: Rng>(rng: &mut R) -> EngnConfig {
    EngnConfig {
        common: random_common(rng),
        pe_rows: rng.gen_range(1..=256),
        pe_cols: rng.gen_range(1..=256),
        cache_bandwidth: rng.gen_bool(0.5).then(|| rng.gen_range(1..=20_000)),
    }
}

pub fn random_hygcn<R: Rng>(rng: &mut R, tile: &TileParams) -> HygcnConfig {
    let gamma = Decimal::from_f64(rng.gen_range(0..=1000) as f64 / 1000.0).unwrap_or(Decimal::ZERO);
    HygcnConfig {
        common: random_common(rng),
        aggregation_pes: rng.gen_range(1..=128),
        combination_pes: rng.gen_range(1..=8192),
        systolic_reuse: gamma,
        sliding_edges: rng.gen_bool(0.5).then(|| rng.gen_range(0..=tile.edges)),
        simd_width: [4, 8, 16][rng.gen_range(0..3)],
        mc_cap_in_elements: rng.gen_bool(0.25),
    }
}
