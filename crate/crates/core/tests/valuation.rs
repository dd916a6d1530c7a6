use archval_core::mplus::{decide, mplus_value, value_trajectory};
use archval_core::renewal::Coupling;
use archval_core::sensitivity::{find_zero_crossing, sweep, Axis, SweepOptions, SweepStreams};
use archval_core::stats::ValueDistribution;
use archval_core::{Error, Scenario};
use proptest::prelude::*;
use serde_json::{json, Value};

/// Rewrites the bundled scenario through its JSON form.
fn edited(edit: impl FnOnce(&mut Value)) -> Scenario {
    let mut v: Value = serde_json::from_str(&Scenario::f6_demo().to_json()).unwrap();
    v.as_object_mut().unwrap().remove("sweeps");
    edit(&mut v);
    Scenario::from_json(&v.to_string()).unwrap()
}

fn catalog_entries(v: &mut Value) -> impl Iterator<Item = &mut Value> {
    let obj = v.as_object_mut().unwrap();
    obj.iter_mut()
        .filter(|(k, _)| ["components", "buses", "tech_package"].contains(&k.as_str()))
        .flat_map(|(_, list)| list.as_array_mut().unwrap().iter_mut())
}

/// Every clock a point mass at 50 years and a one-year horizon: no replacements.
fn initial_only(runs: usize) -> Scenario {
    initial_only_with(runs, 0.0)
}

/// As [`initial_only`], with `extra` k$ added to the monolithic bus.
fn initial_only_with(runs: usize, extra: f64) -> Scenario {
    edited(|v| {
        for c in catalog_entries(v) {
            c["failure"] = json!({"kind": "point_mass", "time": 50});
            if c.get("obsolescence").is_some() {
                c["obsolescence"] = json!({"kind": "point_mass", "time": 50});
            }
            if c["name"] == "bus_monolithic" {
                c["cost"] = json!(34_000.0 + extra);
            }
        }
        v["simulation"]["lifetime"] = json!(1);
        v["simulation"]["runs"] = json!(runs);
        v["simulation"]["trajectory_grid"] = json!([0.5, 1]);
    })
}

fn demo(runs: usize) -> Scenario {
    let mut s = Scenario::f6_demo();
    s.simulation.runs = runs;
    s
}

fn value(s: &Scenario, from: &str, to: &str) -> ValueDistribution {
    mplus_value(s.architecture(from).unwrap(), s.architecture(to).unwrap(), &s.catalog, &s.simulation).unwrap()
}

#[test]
fn identical_architectures_have_zero_value() {
    let s = demo(1_000);
    for name in ["monolithic", "fractionated"] {
        assert!(value(&s, name, name).samples.iter().all(|&x| x == 0.0));
        let arch = s.architecture(name).unwrap();
        let traj = value_trajectory(arch, arch, &s.catalog, &s.simulation).unwrap();
        assert!(traj.points.iter().all(|p| p.samples.iter().all(|&x| x == 0.0)));
    }
}

#[test]
fn value_is_antisymmetric() {
    let s = demo(1_000);
    let forward = value(&s, "monolithic", "fractionated");
    let backward = value(&s, "fractionated", "monolithic");
    assert_eq!(forward.samples.len(), 1_000);
    assert!(forward.samples.iter().zip(&backward.samples).all(|(a, b)| *a == -*b));
}

#[test]
fn initial_deployment_regime() {
    let s = initial_only(500);
    let v = value(&s, "monolithic", "fractionated");
    assert!(v.samples.iter().all(|&x| x == 178_300.0 - 273_800.0));
    let traj = value_trajectory(
        s.architecture("monolithic").unwrap(),
        s.architecture("fractionated").unwrap(),
        &s.catalog,
        &s.simulation,
    )
    .unwrap();
    assert!(traj.points.iter().all(|p| p.samples.iter().all(|&x| x == -95_500.0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn source_only_cost_shifts_value(extra in 0.0f64..1e5) {
        let base = initial_only(50);
        let shifted = initial_only_with(50, extra);
        let a = value(&base, "monolithic", "fractionated");
        let b = value(&shifted, "monolithic", "fractionated");
        for (x, y) in a.samples.iter().zip(&b.samples) {
            prop_assert!((y - x - extra).abs() <= 1e-9 * (1.0 + extra));
        }
    }

    #[test]
    fn decisions_are_monotone_in_threshold(
        samples in prop::collection::vec(-1e5f64..1e5, 1..60),
        q in 0.01f64..0.99,
        t1 in -1e5f64..1e5,
        dt in 0.0f64..1e5,
    ) {
        let v = ValueDistribution::from_samples(samples).unwrap();
        let low = decide(&v, q, t1).unwrap();
        let high = decide(&v, q, t1 + dt).unwrap();
        prop_assert!(!high.recommend || low.recommend);
        prop_assert_eq!(low.recommend, low.statistic > t1);
        prop_assert_eq!(low.statistic, high.statistic);
    }

    #[test]
    fn zero_crossing_lies_in_axis_range(ys in prop::collection::vec(-10.0f64..10.0, 2..20), x0 in -50.0f64..50.0) {
        let points: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (x0 + i as f64, y)).collect();
        match find_zero_crossing(&points).unwrap() {
            Some(x) => prop_assert!(x >= points[0].0 && x <= points.last().unwrap().0),
            None => prop_assert!(ys.iter().all(|&y| y > 0.0) || ys.iter().all(|&y| y < 0.0)),
        }
    }
}

#[test]
fn mean_value_grows_after_first_year() {
    let s = demo(2_000);
    let traj = value_trajectory(
        s.architecture("monolithic").unwrap(),
        s.architecture("fractionated").unwrap(),
        &s.catalog,
        &s.simulation,
    )
    .unwrap();
    for w in traj.points.windows(2) {
        let step: Vec<f64> = w[1].samples.iter().zip(&w[0].samples).map(|(b, a)| b - a).collect();
        let n = step.len() as f64;
        let mean = step.iter().sum::<f64>() / n;
        let sd = (step.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean >= -3.0 * sd / n.sqrt(), "mean step {mean}");
    }
}

#[test]
fn independent_streams_change_samples_not_mean() {
    let mut s = edited(|v| {
        let archs = v["architectures"].as_array_mut().unwrap();
        let mut copy = archs.iter().find(|a| a["name"] == "fractionated").unwrap().clone();
        copy["name"] = json!("fractionated_copy");
        archs.push(copy);
    });
    s.simulation.runs = 4_000;
    assert!(value(&s, "fractionated", "fractionated_copy").samples.iter().all(|&x| x == 0.0));
    let mut independent = s.clone();
    independent.simulation.coupling = Coupling::Independent;
    let same = value(&independent, "fractionated", "fractionated_copy");
    assert!(same.samples.iter().any(|&x| x != 0.0));
    assert!(same.summary.mean.abs() < 4.0 * same.summary.standard_error());
    let common = value(&s, "monolithic", "fractionated").summary;
    let indep = value(&independent, "monolithic", "fractionated").summary;
    let se = (common.standard_error().powi(2) + indep.standard_error().powi(2)).sqrt();
    assert!((common.mean - indep.mean).abs() < 4.0 * se);
}

#[test]
fn decentralization_is_unsupported() {
    let s = edited(|v| {
        let archs = v["architectures"].as_array_mut().unwrap();
        let mut m4 = archs.iter().find(|a| a["name"] == "fractionated").unwrap().clone();
        m4["name"] = json!("autonomous");
        m4["stage"] = json!("M4");
        archs.push(m4);
    });
    let err = mplus_value(
        s.architecture("fractionated").unwrap(),
        s.architecture("autonomous").unwrap(),
        &s.catalog,
        &s.simulation,
    )
    .unwrap_err();
    assert!(matches!(err, Error::UnsupportedTransition(_)), "{err}");
}

fn f6tp_axes(means: &[f64]) -> (Axis, Axis) {
    (
        Axis {
            path: "catalog.f6tp.failure.mean".into(),
            values: means.to_vec(),
        },
        Axis {
            path: "catalog.f6tp.failure.shape".into(),
            values: vec![5.0],
        },
    )
}

#[test]
fn sweep_table_shape_and_determinism() {
    let s = Scenario::f6_demo();
    let (mean, shape) = f6tp_axes(&[10.0, 35.0, 100.0]);
    let options = SweepOptions {
        runs: Some(300),
        ..Default::default()
    };
    let table = sweep(&s, "monolithic", "fractionated", &mean, Some(&shape), options).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert_eq!(table.axes, ["catalog.f6tp.failure.mean", "catalog.f6tp.failure.shape"]);
    let xs: Vec<&[f64]> = table.rows.iter().map(|r| r.axis_values.as_slice()).collect();
    assert_eq!(xs, [[10.0, 5.0], [35.0, 5.0], [100.0, 5.0]]);
    assert!(table.rows.iter().all(|r| r.summary.n == 300));
    let again = sweep(&s, "monolithic", "fractionated", &mean, Some(&shape), options).unwrap();
    assert_eq!(table, again);
}

#[test]
fn refining_the_grid_keeps_existing_rows() {
    let s = Scenario::f6_demo();
    let options = SweepOptions {
        runs: Some(200),
        streams: SweepStreams::PerValue,
    };
    let (coarse, shape) = f6tp_axes(&[10.0, 30.0]);
    let (fine, _) = f6tp_axes(&[10.0, 20.0, 30.0]);
    let a = sweep(&s, "monolithic", "fractionated", &coarse, Some(&shape), options).unwrap();
    let b = sweep(&s, "monolithic", "fractionated", &fine, Some(&shape), options).unwrap();
    assert_eq!(a.rows[0], b.rows[0]);
    assert_eq!(a.rows[1], b.rows[2]);
}

#[test]
fn sweeping_an_unused_entry_changes_nothing() {
    let s = Scenario::f6_demo();
    let axis = Axis {
        path: "catalog.payload_2.cost".into(),
        values: vec![1_000.0, 11_600.0, 50_000.0],
    };
    let shared = SweepOptions {
        runs: Some(2_000),
        streams: SweepStreams::Shared,
    };
    let table = sweep(&s, "monolithic", "fractionated", &axis, None, shared).unwrap();
    assert!(table.rows.windows(2).all(|w| w[0].summary == w[1].summary));

    let per_value = SweepOptions {
        streams: SweepStreams::PerValue,
        ..shared
    };
    let table = sweep(&s, "monolithic", "fractionated", &axis, None, per_value).unwrap();
    let base = &table.rows[0].summary;
    for row in &table.rows[1..] {
        let se = (base.standard_error().powi(2) + row.summary.standard_error().powi(2)).sqrt();
        assert!((row.summary.mean - base.mean).abs() < 4.0 * se);
    }
}

#[test]
fn reliable_tech_package_raises_value() {
    let s = Scenario::f6_demo();
    let (mean, shape) = f6tp_axes(&[10.0, 100.0]);
    let options = SweepOptions {
        runs: Some(4_000),
        streams: SweepStreams::Shared,
    };
    let table = sweep(&s, "monolithic", "fractionated", &mean, Some(&shape), options).unwrap();
    let (short, long) = (&table.rows[0].summary, &table.rows[1].summary);
    let se = (short.standard_error().powi(2) + long.standard_error().powi(2)).sqrt();
    assert!(long.mean - short.mean > 3.0 * se, "{} vs {}", short.mean, long.mean);
}

#[test]
fn sweep_rejects_bad_paths() {
    let s = Scenario::f6_demo();
    for path in ["catalog.nope.cost", "simulation.runs", "catalog.f6tp.obsolescence.mean"] {
        let axis = Axis {
            path: path.into(),
            values: vec![1.0, 2.0],
        };
        let err = sweep(&s, "monolithic", "fractionated", &axis, None, SweepOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{path}: {err}");
    }
    let empty = Axis {
        path: "simulation.lifetime".into(),
        values: vec![],
    };
    assert!(sweep(&s, "monolithic", "fractionated", &empty, None, SweepOptions::default()).is_err());
}
