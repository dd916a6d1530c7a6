//! Renewal-process Monte Carlo over the project lifetime.
//!
//! Each fraction of an architecture is an independent renewal process whose
//! inter-replacement times are i.i.d. copies of its composed replacement
//! distribution. Every clock draw comes from the substream
//! `(seed, run, role, renewal)`, so a run can be reproduced in isolation and
//! two architectures that share a role see the same draws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::architecture::{deployment_cost, ensure_valid, ArchitectureSpec, Catalog};
use crate::error::{Error, Result};
use crate::replacement::architecture_constituents;
use crate::stats::{CostDistribution, SampleDistribution};
use crate::stochastic::{LifetimeDistribution, RngStream};

/// How the random streams of two compared architectures relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Shared substreams keyed by component role (common random numbers).
    #[default]
    Common,
    /// Each architecture draws from its own branch of the stream tree.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// Project lifetime in years.
    #[serde(serialize_with = "crate::scenario::serialize_number")]
    pub lifetime: f64,
    /// Continuous discount rate per year.
    #[serde(serialize_with = "crate::scenario::serialize_number")]
    pub discount_rate: f64,
    /// Launch price in k$ per kg.
    #[serde(serialize_with = "crate::scenario::serialize_number")]
    pub launch_rate: f64,
    pub runs: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_common")]
    pub coupling: Coupling,
}

fn is_common(c: &Coupling) -> bool {
    *c == Coupling::Common
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            lifetime: 20.0,
            discount_rate: 0.02,
            launch_rate: 30.0,
            runs: 10_000,
            seed: 42,
            trajectory_grid: None,
            coupling: Coupling::Common,
        }
    }
}

impl SimulationConfig {
    pub fn issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.lifetime > 0.0 && self.lifetime.is_finite()) {
            issues.push(format!("lifetime must be positive, got {}", self.lifetime));
        }
        if !(self.discount_rate >= 0.0 && self.discount_rate.is_finite()) {
            issues.push(format!("discount_rate must be nonnegative, got {}", self.discount_rate));
        }
        if !(self.launch_rate >= 0.0 && self.launch_rate.is_finite()) {
            issues.push(format!("launch_rate must be nonnegative, got {}", self.launch_rate));
        }
        if self.runs == 0 {
            issues.push("runs must be at least 1".into());
        }
        if let Some(grid) = &self.trajectory_grid {
            if let Err(e) = check_grid(grid, self.lifetime) {
                issues.push(e.to_string());
            }
        }
        issues
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    /// The configured grid, or yearly points `1, 2, ..` up to the lifetime.
    pub fn grid(&self) -> Vec<f64> {
        match &self.trajectory_grid {
            Some(g) => g.clone(),
            None => yearly_grid(self.lifetime),
        }
    }
}

pub fn yearly_grid(lifetime: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..).map(f64::from).take_while(|&t| t <= lifetime).collect();
    if grid.last().is_none_or(|&t| t < lifetime) {
        grid.push(lifetime);
    }
    grid
}

fn check_grid(grid: &[f64], lifetime: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Argument("trajectory grid is empty".into()));
    }
    if grid.iter().any(|&t| !(t > 0.0 && t <= lifetime)) {
        return Err(Error::Argument(format!(
            "trajectory grid points must lie in (0, {lifetime}]"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("trajectory grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Events of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Per fraction, deployment times in `[0, lifetime)` starting at 0.
    pub deployments: Vec<Vec<f64>>,
    /// Discounted cost in k$.
    pub discounted_cost: f64,
}

/// `sum_j cost_j * sum_i exp(-rate * t_ij)`.
pub fn discounted_cost(deployments: &[Vec<f64>], fraction_costs: &[f64], rate: f64) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::ParameterDomain {
            name: "discount_rate",
            value: rate,
            reason: "must be nonnegative",
        });
    }
    if deployments.len() != fraction_costs.len() {
        return Err(Error::Argument(format!(
            "{} deployment lists for {} fraction costs",
            deployments.len(),
            fraction_costs.len()
        )));
    }
    Ok(discounted_until(deployments, fraction_costs, rate, f64::INFINITY))
}

fn discounted_until(deployments: &[Vec<f64>], fraction_costs: &[f64], rate: f64, horizon: f64) -> f64 {
    deployments
        .iter()
        .zip(fraction_costs)
        .map(|(times, &cost)| {
            let factor: f64 = times
                .iter()
                .take_while(|&&t| t < horizon)
                .map(|&t| (-rate * t).exp())
                .sum();
            cost * factor
        })
        .sum()
}

#[derive(Debug, Clone)]
struct Clock {
    role: u64,
    distribution: LifetimeDistribution,
}

#[derive(Debug, Clone)]
struct PreparedFraction {
    cost: f64,
    clocks: Vec<Clock>,
}

/// An architecture resolved against a catalog, ready to simulate.
#[derive(Debug, Clone)]
pub struct PreparedArchitecture {
    name: String,
    fractions: Vec<PreparedFraction>,
}

impl PreparedArchitecture {
    pub fn new(arch: &ArchitectureSpec, catalog: &Catalog, launch_rate: f64) -> Result<Self> {
        ensure_valid(arch, catalog)?;
        let constituents = architecture_constituents(arch, catalog)?;
        let fractions = arch
            .fractions
            .iter()
            .zip(constituents)
            .map(|(f, parts)| {
                Ok(PreparedFraction {
                    cost: deployment_cost(f, catalog, launch_rate)?,
                    clocks: parts
                        .into_iter()
                        .map(|c| Clock {
                            role: c.role_key(),
                            distribution: c.distribution,
                        })
                        .collect(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            name: arch.name.clone(),
            fractions,
        })
    }

    pub fn fraction_costs(&self) -> Vec<f64> {
        self.fractions.iter().map(|f| f.cost).collect()
    }

    /// Deployment times of every fraction for one run.
    pub fn events(&self, root: &RngStream, run_index: u64, lifetime: f64) -> Vec<Vec<f64>> {
        let run = root.child(run_index);
        self.fractions
            .iter()
            .map(|fraction| {
                let clocks: Vec<(RngStream, &LifetimeDistribution)> = fraction
                    .clocks
                    .iter()
                    .map(|c| (run.child(c.role), &c.distribution))
                    .collect();
                let mut times = vec![0.0];
                let mut now = 0.0;
                for renewal in 0u64.. {
                    let gap = clocks
                        .iter()
                        .map(|(stream, d)| {
                            let u = stream.child_rng(renewal).next_open01();
                            d.lifetime_at_survival(u)
                        })
                        .fold(f64::INFINITY, f64::min);
                    now += gap;
                    if !(now < lifetime) {
                        break;
                    }
                    times.push(now);
                }
                times
            })
            .collect()
    }

    /// Cumulative discounted cost of deployments strictly before each grid time.
    pub fn cumulative_costs(&self, events: &[Vec<f64>], rate: f64, grid: &[f64]) -> Vec<f64> {
        let costs = self.fraction_costs();
        grid.iter()
            .map(|&g| discounted_until(events, &costs, rate, g))
            .collect()
    }

    /// Root stream for this architecture under the given coupling.
    pub fn stream_root(&self, seed: u64, coupling: Coupling) -> RngStream {
        let root = RngStream::new(seed);
        match coupling {
            Coupling::Common => root,
            Coupling::Independent => root.named(&self.name),
        }
    }
}

pub fn simulate_run(
    arch: &ArchitectureSpec,
    catalog: &Catalog,
    config: &SimulationConfig,
    run_index: usize,
) -> Result<RunResult> {
    config.ensure_valid()?;
    if run_index >= config.runs {
        return Err(Error::Argument(format!(
            "run index {run_index} out of range for {} runs",
            config.runs
        )));
    }
    let prepared = PreparedArchitecture::new(arch, catalog, config.launch_rate)?;
    let root = prepared.stream_root(config.seed, config.coupling);
    let deployments = prepared.events(&root, run_index as u64, config.lifetime);
    let discounted_cost = discounted_cost(&deployments, &prepared.fraction_costs(), config.discount_rate)?;
    Ok(RunResult {
        deployments,
        discounted_cost,
    })
}

pub fn simulate_many(arch: &ArchitectureSpec, catalog: &Catalog, config: &SimulationConfig) -> Result<CostDistribution> {
    let mut series = run_series(arch, catalog, config, &[config.lifetime])?;
    CostDistribution::from_samples(series.pop().unwrap_or_default())
}

/// Cost distribution at each grid time, all computed from the same runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub points: Vec<SampleDistribution>,
}

pub fn cost_trajectory(arch: &ArchitectureSpec, catalog: &Catalog, config: &SimulationConfig) -> Result<Trajectory> {
    let grid = config.grid();
    check_grid(&grid, config.lifetime)?;
    let series = run_series(arch, catalog, config, &grid)?;
    Ok(Trajectory {
        points: series
            .into_iter()
            .map(SampleDistribution::from_samples)
            .collect::<Result<_>>()?,
        grid,
    })
}

/// Per grid time, the per-run cumulative costs (outer index is the grid).
fn run_series(
    arch: &ArchitectureSpec,
    catalog: &Catalog,
    config: &SimulationConfig,
    grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    config.ensure_valid()?;
    let prepared = PreparedArchitecture::new(arch, catalog, config.launch_rate)?;
    let root = prepared.stream_root(config.seed, config.coupling);
    let per_run: Vec<Vec<f64>> = (0..config.runs as u64)
        .into_par_iter()
        .map(|k| {
            let events = prepared.events(&root, k, config.lifetime);
            prepared.cumulative_costs(&events, config.discount_rate, grid)
        })
        .collect();
    Ok(transpose(per_run, grid.len()))
}

pub(crate) fn transpose(per_run: Vec<Vec<f64>>, width: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(per_run.len()); width];
    for row in per_run {
        for (col, x) in out.iter_mut().zip(row) {
            col.push(x);
        }
    }
    out
}
