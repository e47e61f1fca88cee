//! Analytical data-movement models for GNN accelerators.
//!
//! - [`model`]: parameter types and the bounded-transfer primitive.
//! - [`engn`], [`hygcn`]: per-level movement models of the two accelerators.
//! - [`oracle`]: step-level transfer simulator used to cross-check them.
//! - [`analysis`]: sweeps, saturation, fitting factor, energy, comparison.
//! - [`io`]: config files, serialization and SVG plots behind the CLI.

pub mod analysis;
pub mod breakdown;
pub mod engn;
pub mod error;
pub mod hygcn;
pub mod io;
pub mod model;
pub mod oracle;

pub use breakdown::{Accelerator, MovementBreakdown};
pub use error::{ModelError, Result};
pub use model::{
    bounded_transfer, ceil_div, CommonHwParams, Decimal, EngnConfig, HierarchyTag, HygcnConfig, TileParams,
    TransferMetrics,
};
