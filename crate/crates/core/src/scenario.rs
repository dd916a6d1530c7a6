//! Scenario files: strict JSON schema, validation, and the bundled F6 fixture.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::architecture::{validate, ArchitectureSpec, Catalog, ComponentSpec};
use crate::environment::EnvironmentModel;
use crate::error::{Error, Result};
use crate::renewal::SimulationConfig;
use crate::sensitivity::{Axis, ParameterPath};

/// Bundled stylised F6 demonstration scenario.
pub const F6_DEMO_JSON: &str = include_str!("../data/f6_demo.json");

/// Writes integral values as JSON integers so k$ and kg stay exact in files.
pub(crate) fn serialize_number<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        s.serialize_i64(*x as i64)
    } else {
        s.serialize_f64(*x)
    }
}

/// Default source and target for `value` and `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub to: String,
}

/// A stored sweep definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    pub param: String,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values2: Option<Vec<f64>>,
}

impl SweepSpec {
    pub fn axes(&self) -> (Axis, Option<Axis>) {
        let primary = Axis {
            path: self.param.clone(),
            values: self.values.clone(),
        };
        let secondary = self.param2.as_ref().map(|p| Axis {
            path: p.clone(),
            values: self.values2.clone().unwrap_or_default(),
        });
        (primary, secondary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    simulation: SimulationConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    buses: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tech_package: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    architectures: Vec<ArchitectureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transition: Option<TransitionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    environment: Option<EnvironmentModel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sweeps: Vec<SweepSpec>,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub simulation: SimulationConfig,
    pub catalog: Catalog,
    pub architectures: Vec<ArchitectureSpec>,
    pub transition: Option<TransitionSpec>,
    pub environment: Option<EnvironmentModel>,
    pub sweeps: Vec<SweepSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let catalog = Catalog::new(file.components, file.buses, file.tech_package)?;
        let scenario = Self {
            simulation: file.simulation,
            catalog,
            architectures: file.architectures,
            transition: file.transition,
            environment: file.environment,
            sweeps: file.sweeps,
        };
        let issues = scenario.issues();
        if issues.is_empty() {
            Ok(scenario)
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            simulation: self.simulation.clone(),
            components: self.catalog.components().to_vec(),
            buses: self.catalog.buses().to_vec(),
            tech_package: self.catalog.tech_packages().to_vec(),
            architectures: self.architectures.clone(),
            transition: self.transition.clone(),
            environment: self.environment.clone(),
            sweeps: self.sweeps.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("scenario serialises");
        text.push('\n');
        text
    }

    /// Every problem in the scenario, collected rather than stopping at the first.
    pub fn issues(&self) -> Vec<String> {
        let mut issues = self.simulation.issues();
        issues.extend(self.catalog.issues());
        let mut names = BTreeSet::new();
        for arch in &self.architectures {
            if !names.insert(arch.name.as_str()) {
                issues.push(format!("duplicate architecture name '{}'", arch.name));
            }
            issues.extend(validate(arch, &self.catalog));
        }
        if let Some(t) = &self.transition {
            for name in [&t.from, &t.to] {
                if !names.contains(name.as_str()) {
                    issues.push(format!("transition refers to unknown architecture '{name}'"));
                }
            }
        }
        if let Some(env) = &self.environment {
            issues.extend(env.issues().into_iter().map(|i| format!("environment: {i}")));
        }
        for sweep in &self.sweeps {
            let (primary, secondary) = sweep.axes();
            for axis in std::iter::once(&primary).chain(secondary.as_ref()) {
                if axis.values.is_empty() {
                    issues.push(format!("sweep '{}': no values for '{}'", sweep.name, axis.path));
                }
                match ParameterPath::parse(&axis.path) {
                    Ok(path) => {
                        if let Err(e) = path.check(self) {
                            issues.push(format!("sweep '{}': {e}", sweep.name));
                        }
                    }
                    Err(e) => issues.push(format!("sweep '{}': {e}", sweep.name)),
                }
            }
            if sweep.values2.is_some() && sweep.param2.is_none() {
                issues.push(format!("sweep '{}': values2 given without param2", sweep.name));
            }
        }
        issues
    }

    pub fn architecture(&self, name: &str) -> Result<&ArchitectureSpec> {
        self.architectures
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::Config(format!("no architecture named '{name}'")))
    }

    pub fn f6_demo() -> Self {
        Self::from_json(F6_DEMO_JSON).expect("bundled scenario is valid")
    }

    pub(crate) fn catalog_mut(&mut self) -> &mut Catalog {
        &mut self.catalog
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    Scenario::from_json(&text)
}
