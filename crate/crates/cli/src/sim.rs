use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use navbench::ingest::ScheduleEntry;
use navbench::sim::{format_pose_rows, run_benchmark, LocalizerSpec, SimOutput, SimRunConfig};
use navbench::task::{load_scenario, Mode, Scenario, SMALL_HOUSE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{config_digest, merge, output_dir, read_input, sha256_hex};
use crate::error::{internal, user, CliError};
use crate::output::{display, Manifest, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    #[value(name = "without_map")]
    WithoutMap,
    #[value(name = "with_map")]
    WithMap,
    Both,
}

/// Run the closed-loop benchmark in simulation.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimArgs {
    /// TOML config file; command-line flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Scenario file, or `small_house` for the bundled house
    #[arg(long)]
    pub scenario: Option<String>,
    /// Localizer preset: perfect, drifting_odometry or map_corrected
    #[arg(long)]
    pub localizer: Option<String>,
    /// TOML file with a full localizer description (overrides --localizer)
    #[arg(long)]
    pub localizer_spec: Option<PathBuf>,
    /// Localizer description given inline in the config file
    #[arg(skip)]
    pub localizer_params: Option<LocalizerSpec>,
    /// First seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds to run
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Localization mode; defaults to the scenario's protocol
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Override the number of evaluated rounds
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Integration step in seconds
    #[arg(long)]
    pub dt: Option<f64>,
    /// Skip writing per-step trajectory files
    #[arg(long)]
    #[serde(default)]
    pub no_trajectories: bool,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output root; defaults to $NAVBENCH_OUT or ./navbench-out
    #[arg(long)]
    pub out_root: Option<PathBuf>,
}

pub fn load_scenario_arg(
    arg: &str,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Scenario, CliError> {
    if arg == "small_house" && !Path::new(arg).exists() {
        return load_scenario(SMALL_HOUSE).map_err(internal);
    }
    let path = Path::new(arg);
    let text = read_input(path)?;
    inputs.insert(display(path), sha256_hex(text.as_bytes()));
    load_scenario(&text).map_err(|e| user(format!("scenario `{arg}`: {e}")))
}

fn resolve_localizer(
    args: &SimArgs,
    inputs: &mut BTreeMap<String, String>,
) -> Result<LocalizerSpec, CliError> {
    if let Some(path) = &args.localizer_spec {
        let text = read_input(path)?;
        inputs.insert(display(path), sha256_hex(text.as_bytes()));
        return toml::from_str(&text)
            .map_err(|e| user(format!("localizer spec `{}`: {e}", path.display())));
    }
    if let Some(spec) = &args.localizer_params {
        return Ok(spec.clone());
    }
    let name = args.localizer.as_deref().unwrap_or("map_corrected");
    LocalizerSpec::preset(name).ok_or_else(|| {
        user(format!(
            "unknown localizer `{name}` (expected perfect, drifting_odometry or map_corrected)"
        ))
    })
}

fn format_schedule(entries: &[ScheduleEntry]) -> String {
    let mut out = String::from("# sequence_id waypoint_id round t_start t_end\n");
    for e in entries {
        writeln!(
            out,
            "{} {} {} {:.3} {:.3}",
            e.sequence_id, e.waypoint_id, e.round, e.t_start, e.t_end
        )
        .unwrap();
    }
    out
}

struct Job {
    mode: Mode,
    seed: u64,
}

pub fn run(cli: SimArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let args = merge(&cli, cli.config.as_deref(), "sim")?;
    let mut inputs = BTreeMap::new();
    let scenario_arg = args
        .scenario
        .clone()
        .unwrap_or_else(|| "small_house".into());
    let mut scenario = load_scenario_arg(&scenario_arg, &mut inputs)?;
    if let Some(r) = args.rounds {
        if r < 1 {
            return Err(user("--rounds must be at least 1"));
        }
        scenario.protocol.rounds = r;
    }
    let spec = resolve_localizer(&args, &mut inputs)?;
    spec.validate().map_err(user)?;

    let first = args.seed.unwrap_or(0);
    let count = args.seeds.unwrap_or(1);
    if count == 0 {
        return Err(user("--seeds must be at least 1"));
    }
    let seeds: Vec<u64> = (0..count).map(|i| first.wrapping_add(i)).collect();
    let modes = match args.mode {
        None => vec![scenario.protocol.mode],
        Some(ModeArg::WithoutMap) => vec![Mode::WithoutMap],
        Some(ModeArg::WithMap) => vec![Mode::WithMap],
        Some(ModeArg::Both) => vec![Mode::WithoutMap, Mode::WithMap],
    };
    let jobs: Vec<Job> = modes
        .iter()
        .flat_map(|m| seeds.iter().map(move |s| Job { mode: *m, seed: *s }))
        .collect();

    let base = {
        let mut c = SimRunConfig::new(scenario.clone(), spec.clone(), first);
        if let Some(dt) = args.dt {
            c.dt = dt;
        }
        c.record_trajectories = !args.no_trajectories;
        c
    };
    base.validate().map_err(user)?;

    let mut resolved = serde_json::to_value(&args).map_err(internal)?;
    resolved["scenario"] = json!(scenario_arg);
    resolved["localizer_params"] = serde_json::to_value(&spec).map_err(internal)?;
    resolved["dt"] = json!(base.dt);
    resolved["rounds"] = json!(scenario.protocol.rounds);
    let (digest, config) = config_digest("sim", &resolved, &inputs)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(internal)?;
    let results: Vec<Result<SimOutput, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let mut cfg = base.clone();
                cfg.seed = job.seed;
                cfg.mode = job.mode;
                run_benchmark(&cfg).map_err(internal)
            })
            .collect()
    });

    let mut out = OutputDir::create(output_dir(args.out_root.as_deref(), "sim", &digest))?;
    let mut runs = Vec::new();
    for (job, result) in jobs.iter().zip(results) {
        let result = result?;
        let sub = format!("{}/seed_{}", job.mode, job.seed);
        out.write(&format!("{sub}/table.csv"), &result.table.to_csv_string())?;
        out.write(
            &format!("{sub}/schedule.txt"),
            &format_schedule(&result.schedule),
        )?;
        for log in &result.trajectories {
            out.write(
                &format!("{sub}/truth_{}.txt", log.sequence_id),
                &format_pose_rows(&log.truth),
            )?;
            out.write(
                &format!("{sub}/estimate_{}.txt", log.sequence_id),
                &format_pose_rows(&log.estimate),
            )?;
        }
        let evaluated: Vec<_> = result.outcomes.iter().filter(|o| o.round > 0).collect();
        let arrived = evaluated
            .iter()
            .filter(|o| o.outcome == navbench::sim::Outcome::Arrived)
            .count();
        println!(
            "{} seed {}: {arrived}/{} attempts arrived",
            job.mode,
            job.seed,
            evaluated.len()
        );
        runs.push(json!({
            "mode": job.mode,
            "seed": job.seed,
            "directory": sub,
            "outcomes": result.outcomes,
        }));
    }
    let dir = out.finish(Manifest {
        command: "sim",
        config_digest: digest,
        config,
        seeds,
        inputs,
        runs: json!(runs),
        started,
    })?;
    println!("wrote {}", dir.display());
    Ok(())
}
