use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use navbench::metrics::{framewise_metrics, parse_trajectory, MetricsError, Trajectory};
use navbench::FramewiseReportF64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{config_digest, merge, output_dir, read_input, sha256_hex};
use crate::error::{internal, user, CliError};
use crate::output::{display, Manifest, OutputDir};

pub const FRAMES_SCHEMA: &str = "navbench.framewise-report/1";

/// Evaluate repeated trajectory runs frame by frame.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesArgs {
    /// TOML config file; command-line flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Trajectory file of one run (repeat for each run)
    #[arg(long = "run")]
    #[serde(default)]
    pub runs: Vec<PathBuf>,
    /// Second group of runs, evaluated separately for comparison
    #[arg(long = "with-map")]
    #[serde(default)]
    pub with_map: Vec<PathBuf>,
    /// Ground-truth trajectory
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    /// Maximum timestamp difference when associating frames, seconds
    #[arg(long)]
    pub assoc_tol: Option<f64>,
    /// Rigidly align each run before measuring
    #[arg(long)]
    #[serde(default)]
    pub align: bool,
    /// Output root; defaults to $NAVBENCH_OUT or ./navbench-out
    #[arg(long)]
    pub out_root: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameRow {
    pub timestamp: f64,
    pub precision_position_m: f64,
    pub precision_rotation_rad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_position_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_rotation_rad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupReport {
    pub name: String,
    pub runs: usize,
    pub frames: usize,
    pub precision_position_m: f64,
    pub precision_rotation_rad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_position_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_rotation_rad: Option<f64>,
    pub per_frame: Vec<FrameRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesDocument {
    pub schema: String,
    pub ground_truth: bool,
    pub assoc_tol: f64,
    pub align: bool,
    pub groups: Vec<GroupReport>,
}

impl FramesDocument {
    pub fn validate(&self) -> Result<(), String> {
        if self.schema != FRAMES_SCHEMA {
            return Err(format!("unknown schema `{}`", self.schema));
        }
        for g in &self.groups {
            if g.frames != g.per_frame.len() {
                return Err(format!("group `{}` frame count mismatch", g.name));
            }
            if g.per_frame
                .windows(2)
                .any(|w| w[0].timestamp > w[1].timestamp)
            {
                return Err(format!("group `{}` frames out of order", g.name));
            }
            let has_accuracy = g.accuracy_position_m.is_some();
            if has_accuracy != self.ground_truth
                || g.per_frame
                    .iter()
                    .any(|f| f.accuracy_position_m.is_some() != has_accuracy)
            {
                return Err(format!(
                    "group `{}` accuracy does not match ground truth",
                    g.name
                ));
            }
        }
        Ok(())
    }
}

fn load(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<Trajectory<f64>, CliError> {
    let text = read_input(path)?;
    inputs.insert(display(path), sha256_hex(text.as_bytes()));
    parse_trajectory(&text).map_err(|e| user(format!("`{}`: {e}", path.display())))
}

fn group(
    name: &str,
    paths: &[PathBuf],
    runs: &[Trajectory<f64>],
    gt: Option<&Trajectory<f64>>,
    tol: f64,
    align: bool,
) -> Result<GroupReport, CliError> {
    let report: FramewiseReportF64 =
        framewise_metrics(runs, gt, tol, align).map_err(|e| match e {
            MetricsError::Unsorted {
                trajectory,
                timestamp,
            } => {
                let file = paths
                    .get(trajectory)
                    .map(|p| display(p))
                    .unwrap_or_else(|| "ground truth".into());
                user(format!(
                    "`{file}` is not time-sorted at timestamp {timestamp}"
                ))
            }
            other => user(format!("group `{name}`: {other}")),
        })?;
    Ok(GroupReport {
        name: name.to_string(),
        runs: report.runs,
        frames: report.frames.len(),
        precision_position_m: report.precision_position,
        precision_rotation_rad: report.precision_rotation,
        accuracy_position_m: report.accuracy_position,
        accuracy_rotation_rad: report.accuracy_rotation,
        per_frame: report
            .frames
            .iter()
            .map(|f| FrameRow {
                timestamp: f.timestamp,
                precision_position_m: f.precision_position,
                precision_rotation_rad: f.precision_rotation,
                accuracy_position_m: f.accuracy_position,
                accuracy_rotation_rad: f.accuracy_rotation,
            })
            .collect(),
    })
}

fn frames_csv(g: &GroupReport) -> String {
    let mut out = String::from("timestamp,precision_position_m,precision_rotation_rad,accuracy_position_m,accuracy_rotation_rad\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for f in &g.per_frame {
        writeln!(
            out,
            "{},{},{},{},{}",
            f.timestamp,
            f.precision_position_m,
            f.precision_rotation_rad,
            opt(f.accuracy_position_m),
            opt(f.accuracy_rotation_rad)
        )
        .unwrap();
    }
    out
}

pub fn run(cli: FramesArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let args = merge(&cli, cli.config.as_deref(), "eval_frames")?;
    if args.runs.is_empty() {
        return Err(user("at least one --run trajectory is required"));
    }
    let tol = args.assoc_tol.unwrap_or(0.02);
    let mut inputs = BTreeMap::new();
    let gt = match &args.ground_truth {
        Some(p) => Some(load(p, &mut inputs)?),
        None => None,
    };
    let mut groups = Vec::new();
    for (name, paths) in [("runs", &args.runs), ("with_map", &args.with_map)] {
        if paths.is_empty() {
            continue;
        }
        let trajs = paths
            .iter()
            .map(|p| load(p, &mut inputs))
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(group(name, paths, &trajs, gt.as_ref(), tol, args.align)?);
    }
    let doc = FramesDocument {
        schema: FRAMES_SCHEMA.into(),
        ground_truth: gt.is_some(),
        assoc_tol: tol,
        align: args.align,
        groups,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(internal)? + "\n";
    let back: FramesDocument = serde_json::from_str(&text)
        .map_err(|e| internal(format!("framewise report failed its self-check: {e}")))?;
    back.validate()
        .map_err(|e| internal(format!("framewise report failed its self-check: {e}")))?;

    let (digest, config) = config_digest("eval-frames", &args, &inputs)?;
    let mut out = OutputDir::create(output_dir(args.out_root.as_deref(), "eval-frames", &digest))?;
    out.write("frames.json", &text)?;
    for g in &doc.groups {
        out.write(&format!("frames_{}.csv", g.name), &frames_csv(g))?;
        let acc = match (g.accuracy_position_m, g.accuracy_rotation_rad) {
            (Some(p), Some(r)) => format!(", accuracy {p:.4} m / {r:.4} rad"),
            _ => String::new(),
        };
        println!(
            "{}: {} runs, {} frames, precision {:.4} m / {:.4} rad{acc}",
            g.name, g.runs, g.frames, g.precision_position_m, g.precision_rotation_rad
        );
    }
    let dir = out.finish(Manifest {
        command: "eval-frames",
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
