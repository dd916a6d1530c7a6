//! Valuation of modularity-stage transitions.
//!
//! The library composes failure and obsolescence lifetimes into per-fraction
//! replacement distributions, simulates each architecture as a set of
//! discounted renewal processes, and reports the distribution of the cost
//! difference between a source and a target architecture. The M2 -> M3
//! fractionation of a satellite into separately launched fractions is the
//! worked case, bundled as [`Scenario::f6_demo`].

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod architecture;
pub mod environment;
pub mod error;
pub mod mplus;
pub mod renewal;
pub mod replacement;
pub mod report;
pub mod scenario;
pub mod sensitivity;
pub mod stats;
pub mod stochastic;

pub use architecture::{
    deployment_cost, stage_of, validate, ArchitectureSpec, Catalog, ComponentSpec, FractionSpec,
    ModularityStage,
};
pub use error::{Error, Result};
pub use mplus::{decide, mplus_value, value_trajectory, TransitionDecision, TransitionKind};
pub use renewal::{
    cost_trajectory, discounted_cost, simulate_many, simulate_run, Coupling, RunResult,
    SimulationConfig, Trajectory,
};
pub use replacement::{min_of, replacement_distribution};
pub use scenario::{load_scenario, Scenario};
pub use sensitivity::{find_zero_crossing, sweep, Axis, SweepOptions, SweepStreams, SweepTable};
pub use stats::{CostDistribution, Summary, ValueDistribution};
pub use stochastic::{LifetimeDistribution, RngStream};
