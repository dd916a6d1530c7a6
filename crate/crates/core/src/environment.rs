//! Space-time environment model: which parameter combinations the system has
//! to answer, across stakeholders (space) and periods (time).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentParameter {
    pub name: String,
    /// Ordered level labels, e.g. `["L", "H"]`.
    pub levels: Vec<String>,
}

/// One full assignment of a level to every parameter.
pub type Requirement = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stakeholder {
    /// Per period, the requirement states this stakeholder may impose.
    pub requirements: Vec<Vec<Requirement>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentModel {
    pub parameters: Vec<EnvironmentParameter>,
    pub stakeholders: Vec<Stakeholder>,
    /// Number of periods; inferred from the stakeholders when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<usize>,
    /// Per-period discount factor in (0, 1].
    #[serde(default = "unit", serialize_with = "crate::scenario::serialize_number")]
    pub discount: f64,
}

fn unit() -> f64 {
    1.0
}

/// Level indices, one per parameter, in parameter order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnvironmentState {
    pub levels: Vec<usize>,
}

impl EnvironmentState {
    pub fn labels<'a>(&self, model: &'a EnvironmentModel) -> Vec<&'a str> {
        self.levels
            .iter()
            .zip(&model.parameters)
            .map(|(&i, p)| p.levels[i].as_str())
            .collect()
    }

    pub fn display<'a>(&'a self, model: &'a EnvironmentModel) -> impl fmt::Display + 'a {
        struct D<'a>(&'a EnvironmentState, &'a EnvironmentModel);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({})", self.0.labels(self.1).join(","))
            }
        }
        D(self, model)
    }
}

/// A required state and the first (0-based) period it is needed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequiredState {
    pub state: EnvironmentState,
    pub first_period: usize,
}

impl EnvironmentModel {
    pub fn period_count(&self) -> usize {
        self.periods.unwrap_or_else(|| {
            self.stakeholders
                .iter()
                .map(|s| s.requirements.len())
                .max()
                .unwrap_or(0)
        })
    }

    pub fn issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for p in &self.parameters {
            if p.levels.is_empty() {
                issues.push(format!("parameter '{}' has no levels", p.name));
            }
        }
        let periods = self.period_count();
        if periods == 0 {
            issues.push("environment needs at least one period".into());
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            issues.push(format!("discount must lie in (0, 1], got {}", self.discount));
        }
        for (s, holder) in self.stakeholders.iter().enumerate() {
            if holder.requirements.len() != periods {
                issues.push(format!(
                    "stakeholder {} lists {} periods, expected {periods}",
                    s + 1,
                    holder.requirements.len()
                ));
            }
            for (t, reqs) in holder.requirements.iter().enumerate() {
                for req in reqs {
                    if let Err(e) = self.state_of(req) {
                        issues.push(format!("stakeholder {}, period {}: {e}", s + 1, t + 1));
                    }
                }
            }
        }
        issues
    }

    fn state_of(&self, req: &Requirement) -> Result<EnvironmentState> {
        if let Some(extra) = req.keys().find(|k| !self.parameters.iter().any(|p| &p.name == *k)) {
            return Err(Error::Argument(format!("unknown parameter '{extra}'")));
        }
        let levels = self
            .parameters
            .iter()
            .map(|p| {
                let level = req
                    .get(&p.name)
                    .ok_or_else(|| Error::Argument(format!("no level given for '{}'", p.name)))?;
                p.levels
                    .iter()
                    .position(|l| l == level)
                    .ok_or_else(|| Error::Argument(format!("'{level}' is not a level of '{}'", p.name)))
            })
            .collect::<Result<_>>()?;
        Ok(EnvironmentState { levels })
    }

    fn ensure_valid(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }
}

/// Full cross product of parameter levels, first parameter most significant.
pub fn enumerate_states(model: &EnvironmentModel) -> Result<Vec<EnvironmentState>> {
    if let Some(p) = model.parameters.iter().find(|p| p.levels.is_empty()) {
        return Err(Error::Argument(format!("parameter '{}' has an empty domain", p.name)));
    }
    let mut states = vec![EnvironmentState { levels: Vec::new() }];
    for p in &model.parameters {
        states = states
            .into_iter()
            .flat_map(|s| {
                (0..p.levels.len()).map(move |i| {
                    let mut levels = s.levels.clone();
                    levels.push(i);
                    EnvironmentState { levels }
                })
            })
            .collect();
    }
    Ok(states)
}

/// States named by any stakeholder in any period, each with its earliest period.
pub fn required_states(model: &EnvironmentModel) -> Result<Vec<RequiredState>> {
    model.ensure_valid()?;
    let mut first: BTreeMap<EnvironmentState, usize> = BTreeMap::new();
    for holder in &model.stakeholders {
        for (t, reqs) in holder.requirements.iter().enumerate() {
            for req in reqs {
                let state = model.state_of(req)?;
                first.entry(state).and_modify(|p| *p = (*p).min(t)).or_insert(t);
            }
        }
    }
    Ok(first
        .into_iter()
        .map(|(state, first_period)| RequiredState { state, first_period })
        .collect())
}

/// Discounted count of required states: `sum discount^(first period)`.
pub fn heterogeneity_score(model: &EnvironmentModel) -> Result<f64> {
    Ok(required_states(model)?
        .iter()
        .map(|r| model.discount.powi(r.first_period as i32))
        .sum())
}
