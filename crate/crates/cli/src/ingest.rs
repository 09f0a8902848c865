use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use navbench::ingest::{
    associate_visits, cluster_visits, group_by_station, local_frame_records, parse_detection_log,
    parse_schedule, parse_station_map, Detection, IngestError, IngestParams, Visit,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{config_digest, merge, output_dir, read_input, sha256_hex};
use crate::error::{internal, user, CliError};
use crate::output::{display, Manifest, OutputDir};

/// Build an attainment table from external tag detections.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestArgs {
    /// TOML config file; command-line flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Detection log (repeat for several stations' logs)
    #[arg(long)]
    #[serde(default)]
    pub detections: Vec<PathBuf>,
    /// Schedule of waypoint windows
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Station to waypoint map
    #[arg(long)]
    pub stations: Option<PathBuf>,
    /// Largest gap between detections of one visit, seconds
    #[arg(long)]
    pub gap_max: Option<f64>,
    /// Shortest visit kept, seconds
    #[arg(long)]
    pub dwell_min: Option<f64>,
    /// Allowed clock offset between stations and the schedule, seconds
    #[arg(long)]
    pub skew_tol: Option<f64>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output root; defaults to $NAVBENCH_OUT or ./navbench-out
    #[arg(long)]
    pub out_root: Option<PathBuf>,
}

fn read_hashed(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<String, CliError> {
    let text = read_input(path)?;
    inputs.insert(display(path), sha256_hex(text.as_bytes()));
    Ok(text)
}

fn visit_json(v: &Visit) -> serde_json::Value {
    json!({
        "station_id": v.station_id,
        "t_start": v.t_start,
        "t_end": v.t_end,
        "detections": v.detection_count,
        "fully_visible": v.fully_visible,
    })
}

pub fn run(cli: IngestArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let args = merge(&cli, cli.config.as_deref(), "ingest")?;
    if args.detections.is_empty() {
        return Err(user("at least one --detections log is required"));
    }
    let schedule_path = args
        .schedule
        .clone()
        .ok_or_else(|| user("--schedule is required"))?;
    let stations_path = args
        .stations
        .clone()
        .ok_or_else(|| user("--stations is required"))?;
    let defaults = IngestParams::default();
    let params = IngestParams {
        gap_max: args.gap_max.unwrap_or(defaults.gap_max),
        dwell_min: args.dwell_min.unwrap_or(defaults.dwell_min),
        skew_tol: args.skew_tol.unwrap_or(defaults.skew_tol),
    };
    for (name, v) in [
        ("gap-max", params.gap_max),
        ("dwell-min", params.dwell_min),
        ("skew-tol", params.skew_tol),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(user(format!("--{name} must be a non-negative number")));
        }
    }

    let mut inputs = BTreeMap::new();
    let mut detections: Vec<Detection> = Vec::new();
    for p in &args.detections {
        let text = read_hashed(p, &mut inputs)?;
        let mut d =
            parse_detection_log(&text).map_err(|e| user(format!("`{}`: {e}", p.display())))?;
        detections.append(&mut d);
    }
    let schedule_text = read_hashed(&schedule_path, &mut inputs)?;
    let schedule = parse_schedule(&schedule_text)
        .map_err(|e| user(format!("`{}`: {e}", schedule_path.display())))?;
    let stations_text = read_hashed(&stations_path, &mut inputs)?;
    let stations = parse_station_map(&stations_text)
        .map_err(|e| user(format!("`{}`: {e}", stations_path.display())))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(internal)?;
    let grouped: Vec<(String, Vec<Detection>)> =
        group_by_station(&detections).into_iter().collect();
    let visits: BTreeMap<String, Vec<Visit>> = pool.install(|| {
        grouped
            .into_par_iter()
            .map(|(station, dets)| {
                let v = cluster_visits(&dets, params.gap_max, params.dwell_min);
                (station, v)
            })
            .collect()
    });

    let (digest, config) = config_digest("ingest", &args, &inputs)?;
    let mut out = OutputDir::create(output_dir(args.out_root.as_deref(), "ingest", &digest))?;
    let result = associate_visits(&visits, &schedule, &stations, params.skew_tol)
        .and_then(|a| Ok((local_frame_records(a.table.clone())?, a)));
    let manifest = |runs| Manifest {
        command: "ingest",
        config_digest: digest.clone(),
        config: config.clone(),
        seeds: Vec::new(),
        inputs: inputs.clone(),
        runs,
        started,
    };
    let visit_count: usize = visits.values().map(Vec::len).sum();
    match result {
        Ok((table, assoc)) => {
            out.write("table.csv", &table.to_csv_string())?;
            let attained = table.records().filter(|r| r.is_success()).count();
            let report = json!({
                "schema": "navbench.ingest-report/1",
                "detections": detections.len(),
                "visits": visit_count,
                "matched": assoc.matched,
                "entries": schedule.len(),
                "attained": attained,
                "orphans": assoc.orphans.iter().map(visit_json).collect::<Vec<_>>(),
                "ambiguity": null,
            });
            out.write(
                "ingest_report.json",
                &(serde_json::to_string_pretty(&report).map_err(internal)? + "\n"),
            )?;
            println!(
                "{} detections, {visit_count} visits, {} matched, {attained}/{} entries attained, {} orphan visits",
                detections.len(),
                assoc.matched,
                schedule.len(),
                assoc.orphans.len()
            );
            let dir = out.finish(manifest(json!(null)))?;
            println!("wrote {}", dir.display());
            Ok(())
        }
        Err(e) if e.is_ambiguity() => {
            let report = json!({
                "schema": "navbench.ingest-report/1",
                "detections": detections.len(),
                "visits": visit_count,
                "ambiguity": e.to_string(),
            });
            out.write(
                "ingest_report.json",
                &(serde_json::to_string_pretty(&report).map_err(internal)? + "\n"),
            )?;
            out.finish(manifest(json!(null)))?;
            Err(CliError::Ambiguity(e.to_string()))
        }
        Err(IngestError::Table(e)) => Err(user(e)),
        Err(e) => Err(user(e)),
    }
}
