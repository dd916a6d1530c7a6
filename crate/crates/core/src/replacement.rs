//! Replacement-time composition: a fraction is replaced at the first failure
//! or obsolescence among everything it carries.

use std::collections::BTreeMap;

use crate::architecture::{ArchitectureSpec, Catalog, FractionSpec};
use crate::error::{Error, Result};
use crate::stochastic::{label_hash, LifetimeDistribution};

/// Minimum of independent lifetimes.
pub fn min_of(constituents: Vec<LifetimeDistribution>) -> Result<LifetimeDistribution> {
    if constituents.is_empty() {
        return Err(Error::Argument("min_of needs at least one constituent".into()));
    }
    Ok(LifetimeDistribution::ComposedMin { constituents })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clock {
    Failure,
    Obsolescence,
}

/// One independent clock inside a fraction, tagged with a role that is stable
/// across architectures. The role of the k-th occurrence of a catalog entry
/// is the same in every architecture, which is what couples the draws of two
/// architectures under common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Constituent {
    pub component: String,
    pub clock: Clock,
    pub occurrence: u32,
    pub distribution: LifetimeDistribution,
}

impl Constituent {
    pub fn role_key(&self) -> u64 {
        let clock = match self.clock {
            Clock::Failure => "failure",
            Clock::Obsolescence => "obsolescence",
        };
        label_hash(&format!("{}/{clock}/{}", self.component, self.occurrence))
    }
}

fn collect_constituents(
    fraction: &FractionSpec,
    catalog: &Catalog,
    occurrences: &mut BTreeMap<String, u32>,
) -> Result<Vec<Constituent>> {
    let mut failures = Vec::new();
    let mut obsolescence = Vec::new();
    for name in fraction.members() {
        let spec = catalog.resolve(name)?;
        let slot = occurrences.entry(name.to_string()).or_insert(0);
        let occurrence = *slot;
        *slot += 1;
        failures.push(Constituent {
            component: name.to_string(),
            clock: Clock::Failure,
            occurrence,
            distribution: spec.failure.clone(),
        });
        if let Some(obs) = &spec.obsolescence {
            obsolescence.push(Constituent {
                component: name.to_string(),
                clock: Clock::Obsolescence,
                occurrence,
                distribution: obs.clone(),
            });
        }
    }
    failures.extend(obsolescence);
    Ok(failures)
}

/// Clocks of a single fraction considered on its own.
pub fn fraction_constituents(fraction: &FractionSpec, catalog: &Catalog) -> Result<Vec<Constituent>> {
    collect_constituents(fraction, catalog, &mut BTreeMap::new())
}

/// Clocks of every fraction of an architecture, with occurrence indices
/// counted across the whole architecture (a tech-package shared by name in
/// four fractions yields four distinct roles).
pub fn architecture_constituents(
    arch: &ArchitectureSpec,
    catalog: &Catalog,
) -> Result<Vec<Vec<Constituent>>> {
    let mut occurrences = BTreeMap::new();
    arch.fractions
        .iter()
        .map(|f| collect_constituents(f, catalog, &mut occurrences))
        .collect()
}

/// Replacement-time distribution of a fraction: failure clocks of every
/// component, the bus and the tech-package, plus every declared obsolescence clock.
pub fn replacement_distribution(fraction: &FractionSpec, catalog: &Catalog) -> Result<LifetimeDistribution> {
    let parts = fraction_constituents(fraction, catalog)?;
    min_of(parts.into_iter().map(|c| c.distribution).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::architecture::ComponentSpec;
    use crate::stochastic::{point_mass, weibull};

    #[test]
    fn empty_list_is_rejected() {
        assert!(matches!(min_of(vec![]), Err(Error::Argument(_))));
    }

    #[test]
    fn single_constituent_identity() {
        let d = weibull(15.0, 1.7).unwrap();
        let m = min_of(vec![d.clone()]).unwrap();
        for i in 0..200 {
            let t = i as f64 * 0.37;
            assert!((m.cdf(t).unwrap() - d.cdf(t).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn two_unit_exponentials() {
        let m = min_of(vec![weibull(1.0, 1.0).unwrap(), weibull(1.0, 1.0).unwrap()]).unwrap();
        let expected = 1.0 - (-2.0f64).exp();
        assert!((m.cdf(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((m.cdf(1.0).unwrap() - 0.864665).abs() < 1e-6);
    }

    #[test]
    fn point_mass_fraction_is_point_mass() {
        let pm = |name: &str| ComponentSpec {
            name: name.into(),
            cost: 1.0,
            mass: 1.0,
            failure: point_mass(7.0).unwrap(),
            obsolescence: None,
        };
        let catalog = Catalog::new(vec![pm("unit")], vec![pm("bus")], vec![]).unwrap();
        let fraction = FractionSpec {
            name: None,
            components: vec!["unit".into()],
            bus: "bus".into(),
            tech_package: None,
        };
        let d = replacement_distribution(&fraction, &catalog).unwrap();
        let reference = point_mass(7.0).unwrap();
        for t in [0.0, 3.0, 6.999, 7.0, 7.5, 100.0] {
            assert_eq!(d.cdf(t).unwrap(), reference.cdf(t).unwrap());
        }
        assert_eq!(d.mean(), 7.0);

        let dangling = FractionSpec {
            bus: "nope".into(),
            ..fraction
        };
        assert!(matches!(replacement_distribution(&dangling, &catalog), Err(Error::Catalog(_))));
    }

    #[test]
    fn shared_tech_package_gets_distinct_roles() {
        let c = |name: &str| ComponentSpec {
            name: name.into(),
            cost: 1.0,
            mass: 1.0,
            failure: weibull(5.0, 2.0).unwrap(),
            obsolescence: None,
        };
        let catalog = Catalog::new(vec![c("a"), c("b")], vec![c("bus")], vec![c("tp")]).unwrap();
        let arch = ArchitectureSpec {
            name: "two".into(),
            fractions: ["a", "b"]
                .iter()
                .map(|n| FractionSpec {
                    name: None,
                    components: vec![n.to_string()],
                    bus: "bus".into(),
                    tech_package: Some("tp".into()),
                })
                .collect(),
            stage: None,
            benefit_rate: 0.0,
        };
        let parts = architecture_constituents(&arch, &catalog).unwrap();
        let tp_roles: Vec<u64> = parts
            .iter()
            .flat_map(|f| f.iter().filter(|c| c.component == "tp").map(Constituent::role_key))
            .collect();
        assert_eq!(tp_roles.len(), 2);
        assert_ne!(tp_roles[0], tp_roles[1]);
    }
}
