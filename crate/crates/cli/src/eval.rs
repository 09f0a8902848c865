use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use navbench::metrics::{build_report, validate_document, References, ReportOptions};
use navbench::task::{AttainmentTable, RobotProfile};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{config_digest, merge, output_dir, read_input, sha256_hex};
use crate::error::{internal, user, CliError};
use crate::output::{display, Manifest, OutputDir};
use crate::sim::load_scenario_arg;

/// Evaluate an attainment table: precision, accuracy, completeness and curves.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalArgs {
    /// TOML config file; command-line flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Attainment table (CSV)
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Scenario providing reference poses and the robot profile
    #[arg(long)]
    pub scenario: Option<String>,
    /// Robot diameter in metres
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Camera field of view in degrees
    #[arg(long)]
    pub fov: Option<f64>,
    /// Number of evaluated rounds (defaults to the largest round in the table)
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Upper threshold of the position curve in metres
    #[arg(long)]
    pub x_max_position: Option<f64>,
    /// Upper threshold of the orientation curve in radians
    #[arg(long)]
    pub x_max_orientation: Option<f64>,
    /// Samples per curve
    #[arg(long)]
    pub curve_points: Option<usize>,
    /// Use the scenario only for the robot profile
    #[arg(long)]
    #[serde(default)]
    pub no_references: bool,
    /// Output root; defaults to $NAVBENCH_OUT or ./navbench-out
    #[arg(long)]
    pub out_root: Option<PathBuf>,
}

pub fn run(cli: EvalArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let args = merge(&cli, cli.config.as_deref(), "eval_waypoints")?;
    let mut inputs = BTreeMap::new();
    let table_path = args
        .table
        .clone()
        .ok_or_else(|| user("--table is required"))?;
    let text = read_input(&table_path)?;
    inputs.insert(display(&table_path), sha256_hex(text.as_bytes()));
    let table = AttainmentTable::read_csv(text.as_bytes(), args.rounds)
        .map_err(|e| user(format!("table `{}`: {e}", table_path.display())))?;

    let scenario = match &args.scenario {
        Some(s) => Some(load_scenario_arg(s, &mut inputs)?),
        None => None,
    };
    let profile = match (args.diameter, args.fov, &scenario) {
        (Some(d), Some(f), _) => RobotProfile::new(d, f).map_err(user)?,
        (d, f, Some(s)) => RobotProfile::new(
            d.unwrap_or(s.robot.diameter_m),
            f.unwrap_or(s.robot.fov_deg),
        )
        .map_err(user)?,
        _ => {
            return Err(user(
                "a robot profile is needed: pass --scenario or both --diameter and --fov",
            ))
        }
    };
    let references = match &scenario {
        Some(s) if !args.no_references => Some(References::from_scenario(s)),
        _ => None,
    };
    let options = ReportOptions {
        x_max_position: args.x_max_position,
        x_max_orientation: args.x_max_orientation,
        curve_points: args
            .curve_points
            .unwrap_or(ReportOptions::default().curve_points),
    };
    let report = build_report(&table, references.as_ref(), &profile, &options).map_err(user)?;
    let doc = report.to_json() + "\n";
    validate_document(&doc).map_err(|e| internal(format!("report failed its self-check: {e}")))?;

    let (digest, config) = config_digest("eval-waypoints", &args, &inputs)?;
    let mut out = OutputDir::create(output_dir(
        args.out_root.as_deref(),
        "eval-waypoints",
        &digest,
    ))?;
    out.write("report.json", &doc)?;
    out.write("curve_position.csv", &report.position_curve.to_csv())?;
    out.write("curve_orientation.csv", &report.orientation_curve.to_csv())?;

    let c = &report.completeness;
    println!("completeness {:.4} ({}/{})", c.ratio, c.completed, c.total);
    println!(
        "N-AUC position {:.4} (x_max {} m), orientation {:.4} (x_max {} rad)",
        report.position_curve.n_auc,
        report.position_curve.x_max,
        report.orientation_curve.n_auc,
        report.orientation_curve.x_max
    );
    for w in report.waypoints.iter().filter(|w| w.error.is_some()) {
        eprintln!(
            "warning: {}/{}: {}",
            w.sequence_id,
            w.waypoint_id,
            w.error.as_deref().unwrap_or("")
        );
    }
    let dir = out.finish(Manifest {
        command: "eval-waypoints",
        config_digest: digest,
        config,
        seeds: Vec::new(),
        inputs,
        runs: json!(null),
        started,
    })?;
    println!("wrote {}", dir.display());
    Ok(())
}
