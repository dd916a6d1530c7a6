//! System model: catalog entries, fractions, architectures and modularity stages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::LifetimeDistribution;

/// Position on the five-stage modularity spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModularityStage {
    M0,
    M1,
    M2,
    M3,
    M4,
}

impl ModularityStage {
    pub const ALL: [ModularityStage; 5] = [Self::M0, Self::M1, Self::M2, Self::M3, Self::M4];

    pub fn description(self) -> &'static str {
        match self {
            Self::M0 => "integral: unstructured mapping from functions to physical components",
            Self::M1 => "structured mapping with fixed, product-specific interfaces",
            Self::M2 => "component-modular monolith with flexible standard interfaces",
            Self::M3 => "distributed fractions with a static resource-allocation protocol",
            Self::M4 => "distributed fractions with dynamic, autonomous resource sharing",
        }
    }

    /// Whether an architecture at this stage is a single physical unit.
    pub fn is_monolithic(self) -> bool {
        self <= Self::M2
    }

    pub fn next(self) -> Option<Self> {
        match self {
            Self::M0 => Some(Self::M1),
            Self::M1 => Some(Self::M2),
            Self::M2 => Some(Self::M3),
            Self::M3 => Some(Self::M4),
            Self::M4 => None,
        }
    }
}

impl fmt::Display for ModularityStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A catalog entry: a subsystem, bus or tech-package. Costs in k$, masses in kg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub name: String,
    #[serde(serialize_with = "crate::scenario::serialize_number")]
    pub cost: f64,
    #[serde(serialize_with = "crate::scenario::serialize_number")]
    pub mass: f64,
    pub failure: LifetimeDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obsolescence: Option<LifetimeDistribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Subsystem,
    Bus,
    TechPackage,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Subsystem => "component",
            Self::Bus => "bus",
            Self::TechPackage => "tech-package",
        })
    }
}

/// Named lookup over all catalog entries. Names are unique across kinds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    components: Vec<ComponentSpec>,
    buses: Vec<ComponentSpec>,
    tech_packages: Vec<ComponentSpec>,
    index: BTreeMap<String, (ComponentKind, usize)>,
}

impl Catalog {
    pub fn new(
        components: Vec<ComponentSpec>,
        buses: Vec<ComponentSpec>,
        tech_packages: Vec<ComponentSpec>,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut dupes = Vec::new();
        for (kind, list) in [
            (ComponentKind::Subsystem, &components),
            (ComponentKind::Bus, &buses),
            (ComponentKind::TechPackage, &tech_packages),
        ] {
            for (i, c) in list.iter().enumerate() {
                if index.insert(c.name.clone(), (kind, i)).is_some() {
                    dupes.push(format!("duplicate catalog name '{}'", c.name));
                }
            }
        }
        if !dupes.is_empty() {
            return Err(Error::Validation(dupes));
        }
        Ok(Self {
            components,
            buses,
            tech_packages,
            index,
        })
    }

    pub fn get(&self, name: &str) -> Option<&ComponentSpec> {
        self.entry(name).map(|(_, c)| c)
    }

    pub fn kind_of(&self, name: &str) -> Option<ComponentKind> {
        self.index.get(name).map(|&(k, _)| k)
    }

    fn entry(&self, name: &str) -> Option<(ComponentKind, &ComponentSpec)> {
        let &(kind, i) = self.index.get(name)?;
        let list = match kind {
            ComponentKind::Subsystem => &self.components,
            ComponentKind::Bus => &self.buses,
            ComponentKind::TechPackage => &self.tech_packages,
        };
        Some((kind, &list[i]))
    }

    pub(crate) fn resolve(&self, name: &str) -> Result<&ComponentSpec> {
        self.get(name)
            .ok_or_else(|| Error::Catalog(format!("unknown catalog entry '{name}'")))
    }

    pub(crate) fn get_mut(&mut self, name: &str) -> Option<&mut ComponentSpec> {
        let &(kind, i) = self.index.get(name)?;
        let list = match kind {
            ComponentKind::Subsystem => &mut self.components,
            ComponentKind::Bus => &mut self.buses,
            ComponentKind::TechPackage => &mut self.tech_packages,
        };
        Some(&mut list[i])
    }

    pub fn components(&self) -> &[ComponentSpec] {
        &self.components
    }

    pub fn buses(&self) -> &[ComponentSpec] {
        &self.buses
    }

    pub fn tech_packages(&self) -> &[ComponentSpec] {
        &self.tech_packages
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComponentSpec> {
        self.components
            .iter()
            .chain(&self.buses)
            .chain(&self.tech_packages)
    }

    /// Domain checks on every entry (nonnegative cost and mass, valid distributions).
    pub fn issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for c in self.iter() {
            if !(c.cost >= 0.0 && c.cost.is_finite()) {
                issues.push(format!("'{}': cost must be nonnegative, got {}", c.name, c.cost));
            }
            if !(c.mass >= 0.0 && c.mass.is_finite()) {
                issues.push(format!("'{}': mass must be nonnegative, got {}", c.name, c.mass));
            }
            if let Err(e) = c.failure.validate() {
                issues.push(format!("'{}': failure distribution: {e}", c.name));
            }
            if let Some(Err(e)) = c.obsolescence.as_ref().map(LifetimeDistribution::validate) {
                issues.push(format!("'{}': obsolescence distribution: {e}", c.name));
            }
        }
        issues
    }
}

/// A physically separate unit: its subsystems, a bus and an optional tech-package.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub components: Vec<String>,
    pub bus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tech_package: Option<String>,
}

impl FractionSpec {
    /// Every catalog name carried by the fraction: components, then bus, then tech-package.
    pub fn members(&self) -> impl Iterator<Item = &str> {
        self.components
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.bus.as_str()))
            .chain(self.tech_package.as_deref())
    }

    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("fraction {}", index + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSpec {
    pub name: String,
    pub fractions: Vec<FractionSpec>,
    /// Explicit stage annotation; derived from the fraction count when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<ModularityStage>,
    /// Benefit stream in k$ per year. Zero under the equal-benefit assumption.
    #[serde(
        default,
        skip_serializing_if = "is_zero",
        serialize_with = "crate::scenario::serialize_number"
    )]
    pub benefit_rate: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// Build plus launch cost of one new instance of `fraction`, in k$.
pub fn deployment_cost(fraction: &FractionSpec, catalog: &Catalog, launch_rate: f64) -> Result<f64> {
    if !(launch_rate >= 0.0) {
        return Err(Error::ParameterDomain {
            name: "launch_rate",
            value: launch_rate,
            reason: "must be nonnegative",
        });
    }
    let mut build = 0.0;
    let mut mass = 0.0;
    for name in fraction.members() {
        let c = catalog.resolve(name)?;
        build += c.cost;
        mass += c.mass;
    }
    Ok(build + launch_rate * mass)
}

/// Stage of an architecture: the annotation if present, otherwise M2 for a
/// single fraction and M3 for several.
pub fn stage_of(arch: &ArchitectureSpec) -> ModularityStage {
    arch.stage.unwrap_or(if arch.fractions.len() <= 1 {
        ModularityStage::M2
    } else {
        ModularityStage::M3
    })
}

/// Human-readable invariant violations; empty when the architecture is valid.
pub fn validate(arch: &ArchitectureSpec, catalog: &Catalog) -> Vec<String> {
    let mut issues = Vec::new();
    let who = &arch.name;
    if arch.fractions.is_empty() {
        issues.push(format!("architecture '{who}' has no fractions"));
    }
    let mut seen = BTreeSet::new();
    for (j, fraction) in arch.fractions.iter().enumerate() {
        let label = fraction.label(j);
        if fraction.components.is_empty() {
            issues.push(format!("{label} of '{who}' carries no components"));
        }
        let mut check = |name: &str, expected: ComponentKind| match catalog.kind_of(name) {
            None => issues.push(format!("{label} of '{who}': unknown {expected} '{name}'")),
            Some(kind) if kind != expected => {
                issues.push(format!("{label} of '{who}': '{name}' is a {kind}, not a {expected}"))
            }
            Some(_) => {}
        };
        for name in &fraction.components {
            check(name, ComponentKind::Subsystem);
        }
        check(&fraction.bus, ComponentKind::Bus);
        if let Some(tp) = &fraction.tech_package {
            check(tp, ComponentKind::TechPackage);
        }
        for name in &fraction.components {
            if !seen.insert(name.as_str()) {
                issues.push(format!("component '{name}' appears more than once in '{who}'"));
            }
        }
    }
    if let Some(stage) = arch.stage {
        let n = arch.fractions.len();
        if stage.is_monolithic() && n != 1 {
            issues.push(format!("stage {stage} requires exactly one fraction"));
        } else if !stage.is_monolithic() && n < 2 {
            issues.push(format!("stage {stage} requires at least two fractions"));
        }
    }
    issues
}

/// Like [`validate`] but as a `Result`.
pub fn ensure_valid(arch: &ArchitectureSpec, catalog: &Catalog) -> Result<()> {
    let issues = validate(arch, catalog);
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(issues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::weibull;

    fn part(name: &str, cost: f64, mass: f64) -> ComponentSpec {
        ComponentSpec {
            name: name.into(),
            cost,
            mass,
            failure: weibull(10.0, 1.0).unwrap(),
            obsolescence: None,
        }
    }

    fn catalog() -> Catalog {
        Catalog::new(
            vec![part("a", 10.0, 1.0), part("b", 20.0, 2.0)],
            vec![part("bus1", 5.0, 10.0), part("bus2", 6.0, 12.0)],
            vec![part("tp", 1.0, 0.5)],
        )
        .unwrap()
    }

    fn fraction(components: &[&str], bus: &str, tp: Option<&str>) -> FractionSpec {
        FractionSpec {
            name: None,
            components: components.iter().map(|s| s.to_string()).collect(),
            bus: bus.into(),
            tech_package: tp.map(Into::into),
        }
    }

    fn arch(fractions: Vec<FractionSpec>, stage: Option<ModularityStage>) -> ArchitectureSpec {
        ArchitectureSpec {
            name: "x".into(),
            fractions,
            stage,
            benefit_rate: 0.0,
        }
    }

    #[test]
    fn cost_is_build_plus_launch() {
        let cat = catalog();
        let f = fraction(&["a", "b"], "bus1", Some("tp"));
        assert_eq!(deployment_cost(&f, &cat, 0.0).unwrap(), 36.0);
        assert_eq!(deployment_cost(&f, &cat, 2.0).unwrap(), 36.0 + 2.0 * 13.5);
        assert!(deployment_cost(&f, &cat, -1.0).is_err());
        let dangling = fraction(&["a"], "bus_x", None);
        assert!(matches!(deployment_cost(&dangling, &cat, 1.0), Err(Error::Catalog(_))));
    }

    #[test]
    fn stage_classification() {
        let mono = arch(vec![fraction(&["a", "b"], "bus1", None)], None);
        assert_eq!(stage_of(&mono), ModularityStage::M2);
        let split = arch(
            vec![fraction(&["a"], "bus1", Some("tp")), fraction(&["b"], "bus2", Some("tp"))],
            None,
        );
        assert_eq!(stage_of(&split), ModularityStage::M3);
        let annotated = arch(vec![fraction(&["a", "b"], "bus1", None)], Some(ModularityStage::M1));
        assert_eq!(stage_of(&annotated), ModularityStage::M1);
        assert!(validate(&annotated, &catalog()).is_empty());
        assert!(ModularityStage::M0 < ModularityStage::M4);
    }

    #[test]
    fn stage_fraction_mismatch_is_one_issue() {
        let cat = catalog();
        let four = arch(
            vec![
                fraction(&["a"], "bus1", None),
                fraction(&["b"], "bus2", None),
                fraction(&[], "bus1", None),
                fraction(&[], "bus2", None),
            ],
            Some(ModularityStage::M2),
        );
        let issues = validate(&four, &cat);
        assert!(issues.contains(&"stage M2 requires exactly one fraction".to_string()));
        let ok = arch(
            vec![fraction(&["a"], "bus1", None), fraction(&["b"], "bus2", None)],
            Some(ModularityStage::M2),
        );
        assert_eq!(validate(&ok, &cat), vec!["stage M2 requires exactly one fraction".to_string()]);
    }

    #[test]
    fn dangling_bus_is_reported() {
        let issues = validate(&arch(vec![fraction(&["a"], "bus_x", None)], None), &catalog());
        assert_eq!(issues.len(), 1);
        assert!(issues[0].contains("bus_x"));
    }

    #[test]
    fn duplicate_and_kind_errors() {
        let cat = catalog();
        let dup = arch(
            vec![fraction(&["a"], "bus1", None), fraction(&["a"], "bus2", None)],
            None,
        );
        assert_eq!(validate(&dup, &cat).len(), 1);
        let wrong_kind = arch(vec![fraction(&["a"], "b", None)], None);
        assert!(validate(&wrong_kind, &cat)[0].contains("not a bus"));
        assert!(!validate(&arch(vec![], None), &cat).is_empty());
    }

    #[test]
    fn catalog_rejects_duplicates_and_bad_values() {
        assert!(Catalog::new(vec![part("a", 1.0, 1.0)], vec![part("a", 1.0, 1.0)], vec![]).is_err());
        let mut bad = part("neg", 1.0, -3.0);
        bad.obsolescence = Some(LifetimeDistribution::PointMass { time: -1.0 });
        let cat = Catalog::new(vec![bad], vec![], vec![]).unwrap();
        let issues = cat.issues();
        assert_eq!(issues.len(), 2);
        assert!(issues[0].contains("neg") && issues[0].contains("mass"));
    }
}
