//! Parameter sweeps over a scenario and break-even detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mplus::mplus_value;
use crate::scenario::Scenario;
use crate::stats::{Statistic, Summary};
use crate::stochastic::{weibull_scale_from_mean, LifetimeDistribution, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentField {
    Cost,
    Mass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    Failure,
    Obsolescence,
}

/// A distribution parameter. `Mean` on a Weibull is converted to a scale at
/// the distribution's current shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionField {
    Scale,
    Shape,
    Mean,
    Sd,
    Time,
}

/// A numeric scenario field addressed by a dotted path, e.g.
/// `catalog.f6tp.failure.mean` or `simulation.discount_rate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParameterPath {
    Lifetime,
    DiscountRate,
    LaunchRate,
    Component {
        name: String,
        field: ComponentField,
    },
    Distribution {
        name: String,
        clock: Clock,
        field: DistributionField,
    },
}

impl ParameterPath {
    pub fn parse(path: &str) -> Result<Self> {
        let parts: Vec<&str> = path.split('.').collect();
        let bad = || Error::Config(format!("cannot resolve parameter path '{path}'"));
        Ok(match parts.as_slice() {
            ["simulation", "lifetime"] => Self::Lifetime,
            ["simulation", "discount_rate"] => Self::DiscountRate,
            ["simulation", "launch_rate"] => Self::LaunchRate,
            ["catalog", name, field] => Self::Component {
                name: name.to_string(),
                field: match *field {
                    "cost" => ComponentField::Cost,
                    "mass" => ComponentField::Mass,
                    _ => return Err(bad()),
                },
            },
            ["catalog", name, clock, field] => Self::Distribution {
                name: name.to_string(),
                clock: match *clock {
                    "failure" => Clock::Failure,
                    "obsolescence" => Clock::Obsolescence,
                    _ => return Err(bad()),
                },
                field: match *field {
                    "scale" => DistributionField::Scale,
                    "shape" => DistributionField::Shape,
                    "mean" => DistributionField::Mean,
                    "sd" => DistributionField::Sd,
                    "time" => DistributionField::Time,
                    _ => return Err(bad()),
                },
            },
            _ => return Err(bad()),
        })
    }

    /// Checks that the path addresses an existing field of `scenario`.
    pub fn check(&self, scenario: &Scenario) -> Result<()> {
        let mut copy = scenario.clone();
        let probe = self.current(scenario)?;
        self.apply(&mut copy, probe)
    }

    fn current(&self, scenario: &Scenario) -> Result<f64> {
        let sim = &scenario.simulation;
        Ok(match self {
            Self::Lifetime => sim.lifetime,
            Self::DiscountRate => sim.discount_rate,
            Self::LaunchRate => sim.launch_rate,
            Self::Component { name, field } => {
                let c = scenario.catalog.resolve(name).map_err(|e| Error::Config(e.to_string()))?;
                match field {
                    ComponentField::Cost => c.cost,
                    ComponentField::Mass => c.mass,
                }
            }
            Self::Distribution { .. } => {
                let mut copy = scenario.clone();
                let d = self.distribution_mut(&mut copy)?;
                match (&*d, self.dist_field()) {
                    (LifetimeDistribution::Weibull { scale, .. }, DistributionField::Scale) => *scale,
                    (LifetimeDistribution::Weibull { shape, .. }, DistributionField::Shape) => *shape,
                    (d, DistributionField::Mean) => d.mean(),
                    (LifetimeDistribution::LognormalMoments { sd, .. }, DistributionField::Sd) => *sd,
                    (LifetimeDistribution::PointMass { time }, DistributionField::Time) => *time,
                    _ => return Err(self.mismatch()),
                }
            }
        })
    }

    fn dist_field(&self) -> DistributionField {
        match self {
            Self::Distribution { field, .. } => *field,
            _ => unreachable!("only called for distribution paths"),
        }
    }

    fn mismatch(&self) -> Error {
        Error::Config(format!("parameter {self:?} does not match the distribution kind"))
    }

    fn distribution_mut<'a>(&self, scenario: &'a mut Scenario) -> Result<&'a mut LifetimeDistribution> {
        let Self::Distribution { name, clock, .. } = self else {
            unreachable!("only called for distribution paths")
        };
        let c = scenario
            .catalog_mut()
            .get_mut(name)
            .ok_or_else(|| Error::Config(format!("unknown catalog entry '{name}'")))?;
        match clock {
            Clock::Failure => Ok(&mut c.failure),
            Clock::Obsolescence => c
                .obsolescence
                .as_mut()
                .ok_or_else(|| Error::Config(format!("'{name}' has no obsolescence distribution"))),
        }
    }

    /// Sets the addressed field to `value`.
    pub fn apply(&self, scenario: &mut Scenario, value: f64) -> Result<()> {
        match self {
            Self::Lifetime => scenario.simulation.lifetime = value,
            Self::DiscountRate => scenario.simulation.discount_rate = value,
            Self::LaunchRate => scenario.simulation.launch_rate = value,
            Self::Component { name, field } => {
                let c = scenario
                    .catalog_mut()
                    .get_mut(name)
                    .ok_or_else(|| Error::Config(format!("unknown catalog entry '{name}'")))?;
                match field {
                    ComponentField::Cost => c.cost = value,
                    ComponentField::Mass => c.mass = value,
                }
            }
            Self::Distribution { field, .. } => {
                let field = *field;
                let mismatch = self.mismatch();
                let d = self.distribution_mut(scenario)?;
                match (d, field) {
                    (LifetimeDistribution::Weibull { scale, .. }, DistributionField::Scale) => *scale = value,
                    (LifetimeDistribution::Weibull { shape, .. }, DistributionField::Shape) => *shape = value,
                    (LifetimeDistribution::Weibull { scale, shape }, DistributionField::Mean) => {
                        *scale = weibull_scale_from_mean(value, *shape)?
                    }
                    (LifetimeDistribution::LognormalMoments { mean, .. }, DistributionField::Mean) => *mean = value,
                    (LifetimeDistribution::LognormalMoments { sd, .. }, DistributionField::Sd) => *sd = value,
                    (
                        LifetimeDistribution::PointMass { time },
                        DistributionField::Time | DistributionField::Mean,
                    ) => *time = value,
                    _ => return Err(mismatch),
                }
            }
        }
        Ok(())
    }

    fn is_weibull_mean(&self) -> bool {
        matches!(
            self,
            Self::Distribution {
                field: DistributionField::Mean,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

/// How grid points draw their random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepStreams {
    /// Seed derived from the hashed axis values, so refining a grid leaves
    /// existing points unchanged.
    #[default]
    PerValue,
    /// Every grid point reuses the scenario seed (common random numbers
    /// across the sweep).
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    pub runs: Option<usize>,
    pub streams: SweepStreams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Primary value, then the secondary value if any.
    pub axis_values: Vec<f64>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Zero crossing of `stat` along the primary axis, one entry per
    /// secondary value (a single entry keyed `None` for 1-D sweeps).
    pub fn zero_crossings(&self, stat: Statistic) -> Result<Vec<(Option<f64>, Option<f64>)>> {
        let mut groups: Vec<(Option<f64>, Vec<(f64, f64)>)> = Vec::new();
        for row in &self.rows {
            let key = row.axis_values.get(1).copied();
            let point = (row.axis_values[0], row.summary.statistic(stat));
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, pts)) => pts.push(point),
                None => groups.push((key, vec![point])),
            }
        }
        groups
            .into_iter()
            .map(|(key, pts)| Ok((key, find_zero_crossing(&pts)?)))
            .collect()
    }
}

fn point_seed(seed: u64, values: &[f64], streams: SweepStreams) -> u64 {
    match streams {
        SweepStreams::Shared => seed,
        SweepStreams::PerValue => {
            let stream = values
                .iter()
                .fold(RngStream::new(seed).named("sweep"), |s, v| s.child(v.to_bits()));
            stream.rng().next_u64()
        }
    }
}

/// Evaluates the `from -> to` transition value at every grid point.
/// Rows are ordered secondary-major, primary-minor, following the given value order.
pub fn sweep(
    scenario: &Scenario,
    from: &str,
    to: &str,
    axis: &Axis,
    secondary: Option<&Axis>,
    options: SweepOptions,
) -> Result<SweepTable> {
    let axes: Vec<&Axis> = std::iter::once(axis).chain(secondary).collect();
    let mut paths = Vec::with_capacity(axes.len());
    for a in &axes {
        if a.values.is_empty() {
            return Err(Error::Config(format!("no values given for '{}'", a.path)));
        }
        let path = ParameterPath::parse(&a.path)?;
        path.check(scenario)?;
        paths.push(path);
    }
    scenario.architecture(from)?;
    scenario.architecture(to)?;

    let secondary_values: Vec<Option<f64>> = match secondary {
        Some(a) => a.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut rows = Vec::new();
    for &v2 in &secondary_values {
        for &v1 in &axis.values {
            let values: Vec<f64> = std::iter::once(v1).chain(v2).collect();
            let mut point = scenario.clone();
            // Weibull means depend on the shape, so they are applied last.
            let mut order: Vec<usize> = (0..paths.len()).collect();
            order.sort_by_key(|&i| paths[i].is_weibull_mean());
            for i in order {
                paths[i].apply(&mut point, values[i])?;
            }
            let issues = point.issues();
            if !issues.is_empty() {
                return Err(Error::Validation(issues));
            }
            let mut config = point.simulation.clone();
            if let Some(runs) = options.runs {
                config.runs = runs;
            }
            config.seed = point_seed(config.seed, &values, options.streams);
            let value = mplus_value(point.architecture(from)?, point.architecture(to)?, &point.catalog, &config)?;
            rows.push(SweepRow {
                axis_values: values,
                summary: value.summary,
            });
        }
    }
    Ok(SweepTable {
        axes: axes.iter().map(|a| a.path.clone()).collect(),
        rows,
    })
}

/// First sign change of `y` over `(x, y)` points sorted by `x`, located by
/// linear interpolation. A point with `y == 0` is itself the crossing.
pub fn find_zero_crossing(points: &[(f64, f64)]) -> Result<Option<f64>> {
    if points.len() < 2 {
        return Err(Error::Argument("zero crossing needs at least two rows".into()));
    }
    for w in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == 0.0 {
            return Ok(Some(x0));
        }
        if y1 == 0.0 {
            return Ok(Some(x1));
        }
        if (y0 < 0.0) != (y1 < 0.0) {
            return Ok(Some(x0 - y0 * (x1 - x0) / (y1 - y0)));
        }
    }
    Ok(None)
}
