//! Experiments built on the accelerator models: parameter sweeps,
//! bandwidth saturation, the array fitting-factor study, weighted energy and
//! the EnGN/HyGCN comparison.

mod compare;
mod energy;
mod sweep;

pub use compare::{compare, Comparison, RatioRow};
pub use energy::{energy_estimate, level_costs, EnergyWeights, LevelCost};
pub use sweep::{
    configure_point, fitting_factor_sweep, rows_for_fitting_factor, run_sweep, saturation_point, HardwareConfig, Link,
    Param, Step, SweepPoint, SweepSeries, SweepSpec, SweepValues,
};
