#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use archval_core::environment::{enumerate_states, heterogeneity_score, required_states};
use archval_core::mplus::{decide, value_trajectory, TransitionKind};
use archval_core::renewal::{cost_trajectory, Coupling};
use archval_core::report;
use archval_core::scenario::{Scenario, F6_DEMO_JSON};
use archval_core::sensitivity::{sweep, Axis, SweepOptions, SweepStreams};
use archval_core::stats::Statistic;
use archval_core::{stage_of, Error};
use clap::{Args, Parser, Subcommand};

/// Monte Carlo valuation of modularity-stage transitions.
#[derive(Debug, Parser)]
#[command(name = "archval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArg {
    /// Scenario JSON file (`f6_demo` selects the bundled scenario).
    #[arg(short = 's', long = "scenario")]
    scenario: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Number of Monte Carlo runs (overrides the scenario).
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed (overrides the scenario).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file and report every issue.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
    /// Cost trajectories of one or more architectures.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Architecture name; repeat for several.
        #[arg(short = 'a', long = "arch", required = true)]
        arch: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated grid times in years, e.g. `1,5,10,20`.
        #[arg(long = "grid-years", value_parser = parse_list)]
        grid_years: Option<List>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Value distribution of a transition and a risk-based recommendation.
    Value {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "grid-years", value_parser = parse_list)]
        grid_years: Option<List>,
        /// Quantile of the value distribution the decision is based on.
        #[arg(long = "risk-quantile", default_value_t = 0.5)]
        risk_quantile: f64,
        /// Minimum value (k$) the quantile must exceed.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        threshold: f64,
        /// Draw the two architectures from independent streams.
        #[arg(long)]
        independent: bool,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Transition value over a parameter grid.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Parameter path, e.g. `catalog.f6tp.failure.mean`.
        #[arg(long, requires = "values")]
        param: Option<String>,
        /// Comma-separated values or `start:stop:step`.
        #[arg(long, value_parser = parse_list, allow_negative_numbers = true)]
        values: Option<List>,
        #[arg(long, requires_all = ["values2", "param"])]
        param2: Option<String>,
        #[arg(long, value_parser = parse_list, allow_negative_numbers = true)]
        values2: Option<List>,
        /// Stored sweep to run when `--param` is absent (defaults to the first).
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        /// Reuse the scenario seed at every grid point.
        #[arg(long = "shared-streams")]
        shared_streams: bool,
        /// Statistic used for the zero crossing: mean, q05, q25, q50, q75, q95.
        #[arg(long, default_value = "mean")]
        crossing: Statistic,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Environment states, required states and heterogeneity score.
    EnvStates {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
}

/// A parsed numeric list. Wrapped so clap treats it as one argument value.
#[derive(Debug, Clone, PartialEq)]
struct List(Vec<f64>);

fn parse_list(text: &str) -> Result<List, String> {
    parse_numbers(text).map(List)
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if let [start, stop, step] = parts.as_slice() {
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"));
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0) || stop < start {
            return Err("range must be start:stop:step with step > 0 and stop >= start".into());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}")))
        .collect()
}

fn load(arg: &ScenarioArg) -> Result<Scenario, Error> {
    let path = &arg.scenario;
    if !path.exists() {
        let stem = path.file_stem().and_then(|s| s.to_str());
        if path.parent().is_none_or(|p| p.as_os_str().is_empty()) && stem == Some("f6_demo") {
            return Scenario::from_json(F6_DEMO_JSON);
        }
    }
    archval_core::load_scenario(path)
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| Error::Io(e.to_string()))?;
    Ok(target)
}

fn transition_names(scenario: &Scenario, from: Option<String>, to: Option<String>) -> Result<(String, String), Error> {
    let default = scenario.transition.clone();
    let from = from
        .or_else(|| default.as_ref().map(|t| t.from.clone()))
        .ok_or_else(|| Error::Config("no --from given and the scenario has no transition".into()))?;
    let to = to
        .or_else(|| default.map(|t| t.to))
        .ok_or_else(|| Error::Config("no --to given and the scenario has no transition".into()))?;
    Ok((from, to))
}

fn apply_run_args(scenario: &mut Scenario, run: &RunArgs, grid: Option<Vec<f64>>) {
    if let Some(runs) = run.runs {
        scenario.simulation.runs = runs;
    }
    if let Some(seed) = run.seed {
        scenario.simulation.seed = seed;
    }
    if grid.is_some() {
        scenario.simulation.trajectory_grid = grid;
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate { scenario } => {
            let s = load(&scenario)?;
            println!(
                "ok: {} catalog entries, {} architectures",
                s.catalog.iter().count(),
                s.architectures.len()
            );
            for arch in &s.architectures {
                println!("  {} ({} fractions, stage {})", arch.name, arch.fractions.len(), stage_of(arch));
            }
        }
        Command::Simulate {
            scenario,
            arch,
            run,
            grid_years,
            out,
        } => {
            let mut s = load(&scenario)?;
            apply_run_args(&mut s, &run, grid_years.map(|g| g.0));
            s.simulation.ensure_valid()?;
            let mut trajectories = Vec::new();
            for name in &arch {
                let spec = s.architecture(name)?;
                trajectories.push((name.as_str(), cost_trajectory(spec, &s.catalog, &s.simulation)?));
            }
            let refs: Vec<(&str, &_)> = trajectories.iter().map(|(n, t)| (*n, t)).collect();
            let path = write_atomic(&out, "trajectory.csv", &report::trajectory_csv(&refs)?)?;
            println!("wrote {}", path.display());
        }
        Command::Value {
            scenario,
            from,
            to,
            run,
            grid_years,
            risk_quantile,
            threshold,
            independent,
            out,
        } => {
            let mut s = load(&scenario)?;
            apply_run_args(&mut s, &run, grid_years.map(|g| g.0));
            if independent {
                s.simulation.coupling = Coupling::Independent;
            }
            s.simulation.ensure_valid()?;
            let (from, to) = transition_names(&s, from, to)?;
            let (source, target) = (s.architecture(&from)?, s.architecture(&to)?);
            let mut config = s.simulation.clone();
            let mut grid = config.grid();
            if grid.last() != Some(&config.lifetime) {
                grid.push(config.lifetime);
            }
            config.trajectory_grid = Some(grid);
            let traj = value_trajectory(source, target, &s.catalog, &config)?;
            let final_value = traj.points.last().expect("grid ends at the lifetime");
            let decision = decide(final_value, risk_quantile, threshold)?;
            let kind = TransitionKind::between(stage_of(source), stage_of(target));
            let value_path = write_atomic(&out, "value.csv", &report::value_csv(&traj)?)?;
            let text = report::decision_report(&from, &to, kind, &final_value.summary, &decision);
            let report_path = write_atomic(&out, "decision.txt", &text)?;
            print!("{text}");
            println!("wrote {} and {}", value_path.display(), report_path.display());
        }
        Command::Sweep {
            scenario,
            from,
            to,
            param,
            values,
            param2,
            values2,
            name,
            run,
            shared_streams,
            crossing,
            out,
        } => {
            let mut s = load(&scenario)?;
            apply_run_args(&mut s, &run, None);
            let (from, to) = transition_names(&s, from, to)?;
            let (primary, secondary) = match (param, values) {
                (Some(path), Some(List(values))) => (
                    Axis { path, values },
                    param2.zip(values2).map(|(path, List(values))| Axis { path, values }),
                ),
                _ => {
                    let spec = match &name {
                        Some(n) => s.sweeps.iter().find(|sw| &sw.name == n),
                        None => s.sweeps.first(),
                    }
                    .ok_or_else(|| Error::Config("no --param given and no matching stored sweep".into()))?;
                    spec.axes()
                }
            };
            let options = SweepOptions {
                runs: run.runs,
                streams: if shared_streams {
                    SweepStreams::Shared
                } else {
                    SweepStreams::PerValue
                },
            };
            let table = sweep(&s, &from, &to, &primary, secondary.as_ref(), options)?;
            let csv = report::sweep_csv(&table, crossing)?;
            let path = write_atomic(&out, "sweep.csv", &csv)?;
            for line in csv.lines().filter(|l| l.starts_with('#')) {
                println!("{line}");
            }
            println!("wrote {}", path.display());
        }
        Command::EnvStates { scenario } => {
            let s = load(&scenario)?;
            let env = s
                .environment
                .as_ref()
                .ok_or_else(|| Error::Config("scenario has no environment section".into()))?;
            let all = enumerate_states(env)?;
            let required = required_states(env)?;
            let names: Vec<&str> = env.parameters.iter().map(|p| p.name.as_str()).collect();
            println!("state\t{}\trequired\tfirst_period", names.join("\t"));
            for (i, state) in all.iter().enumerate() {
                let hit = required.iter().find(|r| &r.state == state);
                println!(
                    "S{}\t{}\t{}\t{}",
                    i + 1,
                    state.labels(env).join("\t"),
                    if hit.is_some() { "yes" } else { "no" },
                    hit.map_or_else(|| "-".to_string(), |r| (r.first_period + 1).to_string()),
                );
            }
            println!("states={} required={}", all.len(), required.len());
            println!("heterogeneity_score={}", report::format_sig6(heterogeneity_score(env)?));
        }
    }
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("ARCHVAL_THREADS") {
        let n: usize = text
            .trim()
            .parse()
            .map_err(|_| format!("ARCHVAL_THREADS must be a positive integer, got '{text}'"))?;
        if n == 0 {
            return Err("ARCHVAL_THREADS must be at least 1".into());
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_numbers("1,2.5, 3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_numbers("5:20:5").unwrap(), vec![5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_numbers("5:100:5").unwrap().len(), 20);
        assert!(parse_numbers("a,b").is_err());
        assert!(parse_numbers("1:0:1").is_err());
    }
}
