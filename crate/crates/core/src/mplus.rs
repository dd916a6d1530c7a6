//! Value of moving an architecture one step along the modularity spectrum,
//! and a risk-tolerant accept/reject rule on top of it.

use std::fmt;

use rayon::prelude::*;

use crate::architecture::{stage_of, ArchitectureSpec, Catalog, ModularityStage};
use crate::error::{Error, Result};
use crate::renewal::{transpose, PreparedArchitecture, SimulationConfig, Trajectory};
use crate::stats::{quantile, SampleDistribution, ValueDistribution};

/// The named operators between adjacent stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    /// M1 to M2: introduce standard interfaces.
    Splitting,
    /// M2 to M3: move subsystems into separate fractions.
    Fractionation,
    /// M3 to M4: dynamic resource sharing between autonomous fractions.
    /// Valuing it needs an agent-based model that this crate does not provide.
    Decentralization,
}

impl TransitionKind {
    pub fn between(source: ModularityStage, target: ModularityStage) -> Option<Self> {
        use ModularityStage::*;
        match (source, target) {
            (M1, M2) => Some(Self::Splitting),
            (M2, M3) => Some(Self::Fractionation),
            (M3, M4) => Some(Self::Decentralization),
            _ => None,
        }
    }
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Splitting => "splitting (M1 -> M2)",
            Self::Fractionation => "fractionation (M2 -> M3)",
            Self::Decentralization => "decentralization (M3 -> M4)",
        })
    }
}

/// Present value of a constant benefit stream over `[0, horizon)`.
fn benefit_value(rate: f64, discount_rate: f64, horizon: f64) -> f64 {
    if rate == 0.0 {
        0.0
    } else if discount_rate == 0.0 {
        rate * horizon
    } else {
        rate * (1.0 - (-discount_rate * horizon).exp()) / discount_rate
    }
}

struct Pair {
    source: PreparedArchitecture,
    target: PreparedArchitecture,
    source_benefit: f64,
    target_benefit: f64,
}

fn prepare(
    source: &ArchitectureSpec,
    target: &ArchitectureSpec,
    catalog: &Catalog,
    config: &SimulationConfig,
) -> Result<Pair> {
    config.ensure_valid()?;
    if let Some(TransitionKind::Decentralization) = TransitionKind::between(stage_of(source), stage_of(target)) {
        return Err(Error::UnsupportedTransition(format!(
            "'{}' -> '{}' is a decentralization step, which needs agent-based valuation",
            source.name, target.name
        )));
    }
    Ok(Pair {
        source: PreparedArchitecture::new(source, catalog, config.launch_rate)?,
        target: PreparedArchitecture::new(target, catalog, config.launch_rate)?,
        source_benefit: source.benefit_rate,
        target_benefit: target.benefit_rate,
    })
}

/// Per-run value (source net cost minus target net cost) at each grid time.
fn value_series(pair: &Pair, config: &SimulationConfig, grid: &[f64]) -> Vec<Vec<f64>> {
    let r = config.discount_rate;
    let source_root = pair.source.stream_root(config.seed, config.coupling);
    let target_root = pair.target.stream_root(config.seed, config.coupling);
    let per_run: Vec<Vec<f64>> = (0..config.runs as u64)
        .into_par_iter()
        .map(|k| {
            // Both architectures of a run are simulated back to back in one task.
            let s_events = pair.source.events(&source_root, k, config.lifetime);
            let t_events = pair.target.events(&target_root, k, config.lifetime);
            let s_cost = pair.source.cumulative_costs(&s_events, r, grid);
            let t_cost = pair.target.cumulative_costs(&t_events, r, grid);
            grid.iter()
                .zip(s_cost.iter().zip(&t_cost))
                .map(|(&g, (&s, &t))| {
                    let s_net = s - benefit_value(pair.source_benefit, r, g);
                    let t_net = t - benefit_value(pair.target_benefit, r, g);
                    s_net - t_net
                })
                .collect()
        })
        .collect();
    transpose(per_run, grid.len())
}

/// Value distribution of replacing `source` by `target` over the full lifetime.
/// Positive samples favour the transition.
pub fn mplus_value(
    source: &ArchitectureSpec,
    target: &ArchitectureSpec,
    catalog: &Catalog,
    config: &SimulationConfig,
) -> Result<ValueDistribution> {
    let pair = prepare(source, target, catalog, config)?;
    let mut series = value_series(&pair, config, &[config.lifetime]);
    ValueDistribution::from_samples(series.pop().unwrap_or_default())
}

/// Value distribution of cumulative cost differences at each grid time.
pub fn value_trajectory(
    source: &ArchitectureSpec,
    target: &ArchitectureSpec,
    catalog: &Catalog,
    config: &SimulationConfig,
) -> Result<Trajectory> {
    let grid = config.grid();
    let pair = prepare(source, target, catalog, config)?;
    let series = value_series(&pair, config, &grid);
    Ok(Trajectory {
        points: series
            .into_iter()
            .map(SampleDistribution::from_samples)
            .collect::<Result<_>>()?,
        grid,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDecision {
    pub recommend: bool,
    /// e.g. "q50 of value > 0 k$".
    pub criterion: String,
    /// The evaluated quantile of the value distribution, in k$.
    pub statistic: f64,
    pub risk_quantile: f64,
    pub threshold: f64,
}

/// Recommends the transition iff the `risk_quantile` quantile of the value
/// exceeds `threshold`. Quantiles below 0.5 encode risk aversion.
pub fn decide(value: &ValueDistribution, risk_quantile: f64, threshold: f64) -> Result<TransitionDecision> {
    if !(risk_quantile > 0.0 && risk_quantile < 1.0) {
        return Err(Error::Argument(format!(
            "risk quantile must lie in (0, 1), got {risk_quantile}"
        )));
    }
    let statistic = quantile(&value.samples, risk_quantile)?;
    Ok(TransitionDecision {
        recommend: statistic > threshold,
        criterion: format!("quantile {risk_quantile} of value > {threshold} k$"),
        statistic,
        risk_quantile,
        threshold,
    })
}
