//! Command-line driver behind the `rfcharge` binary.
//!
//! Settings are resolved in three layers: built-in defaults, then the
//! `--config` file (key-value text or a previously written manifest), then
//! flags. The resolved settings are written back out in the manifest, so
//! `rfcharge --config out/simulate.manifest.json simulate` repeats a run.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{apply_entries, apply_entry, parse_entries, to_entries};
use crate::deployment::write_points_csv;
use crate::error::Error;
use crate::feasibility::{
    default_band_plan, default_modes, feasibility_table, read_band_plan, reference, write_csv,
    FeasibilityOptions,
};
use crate::linkbudget::{AntennaMode, RadioBand};
use crate::mobility::{write_trajectories_csv, MobilityModel};
use crate::simengine::{
    energy_cdf, raw_energy_cdf, replication_layout, run_simulation, sweep, ScenarioConfig,
    SimMetrics, SweepAxis, SweepPoint,
};

pub const TOOL: &str = "rfcharge";

#[derive(Debug, Parser)]
#[command(
    name = "rfcharge",
    version,
    about = "RF charging of wearables from small base stations"
)]
pub struct Cli {
    /// Master seed; overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for all outputs (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Key-value scenario file, or a manifest from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-band link-budget table for omni and directional SBSs.
    Feasibility(FeasibilityArgs),
    /// Run the mobility/charging simulation.
    Simulate(SimulateArgs),
    /// Repeat the simulation over a grid of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    /// CSV band plan (column band_hz, center_frequency_hz or frequency_mhz).
    #[arg(long)]
    pub bands: Option<PathBuf>,
    /// Device consumption, µW.
    #[arg(long)]
    pub consumed_uw: Option<f64>,
    /// Autonomy target, minutes.
    #[arg(long)]
    pub autonomy_min: Option<f64>,
    /// Apply the receiver conversion efficiency to harvested power.
    #[arg(long)]
    pub apply_efficiency: bool,
    /// Compare against the published reference table.
    #[arg(long)]
    pub check_paper: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// SBS antenna mode: omni or directional.
    #[arg(long)]
    pub mode: Option<String>,
    /// Write SBS positions of replication 0.
    #[arg(long)]
    pub dump_deployment: bool,
    /// Write user trajectories of replication 0.
    #[arg(long)]
    pub dump_trajectories: bool,
    /// Keep every n-th position in the trajectory dump.
    #[arg(long)]
    pub trajectory_stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// sbs, speed (km/h) or users.
    #[arg(long)]
    pub axis: Option<String>,
    /// `start:stop:step` (inclusive) or a comma list.
    #[arg(long)]
    pub values: Option<String>,
    /// omni, directional or both.
    #[arg(long)]
    pub modes: Option<String>,
}

/// Scenario overrides shared by `simulate` and `sweep`.
#[derive(Debug, Args, Default)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub sbs: Option<usize>,
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long)]
    pub speed_kmh: Option<f64>,
    /// Fractional Brownian motion with this Hurst exponent.
    #[arg(long, conflicts_with = "levy_alpha")]
    pub hurst: Option<f64>,
    /// Lévy flight with this tail index.
    #[arg(long)]
    pub levy_alpha: Option<f64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Simulated time, s.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Serve each user from its nearest SBS only.
    #[arg(long)]
    pub one_beam: bool,
    /// Any configuration key, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Usage/config problems exit with 1, everything else with 2.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub master_seed: u64,
    /// Every setting the run used, as configuration keys.
    pub config: BTreeMap<String, String>,
    pub wall_clock_s: f64,
    pub outputs: Vec<String>,
}

/// Parse `args` (program name first) and run. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let argv: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&cli, argv) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn execute(cli: &Cli, argv: Vec<String>) -> Outcome<()> {
    let started = Instant::now();
    let file_entries = match &cli.config {
        Some(path) => load_entries(path)?,
        None => Vec::new(),
    };
    let (command, config, outputs) = match &cli.command {
        Command::Feasibility(a) => {
            let (cfg, out) = cmd_feasibility(cli, a, file_entries)?;
            ("feasibility", cfg, out)
        }
        Command::Simulate(a) => {
            let (cfg, out) = cmd_simulate(cli, a, file_entries)?;
            ("simulate", cfg, out)
        }
        Command::Sweep(a) => {
            let (cfg, out) = cmd_sweep(cli, a, file_entries)?;
            ("sweep", cfg, out)
        }
    };
    let master_seed = config
        .get("sim.seed")
        .and_then(|s| s.parse().ok())
        .unwrap_or_default();
    let manifest = RunManifest {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        argv,
        master_seed,
        config,
        wall_clock_s: started.elapsed().as_secs_f64(),
        outputs,
    };
    let path = cli.out_dir.join(format!("{command}.manifest.json"));
    write_json(&path, &manifest)?;
    Ok(())
}

/// Entries from a key-value file, or the `config` map of a manifest.
fn load_entries(path: &Path) -> Outcome<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| usage(format!("{} is not a manifest: {e}", path.display())))?;
        Ok(manifest.config.into_iter().collect())
    } else {
        Ok(parse_entries(&text)?)
    }
}

/// Split off `prefix.*` keys, which belong to one subcommand.
fn take_prefixed(entries: &mut Vec<(String, String)>, prefix: &str) -> BTreeMap<String, String> {
    let mut taken = BTreeMap::new();
    entries.retain(|(k, v)| match k.strip_prefix(prefix) {
        Some(rest) if rest.starts_with('.') => {
            taken.insert(rest[1..].to_string(), v.clone());
            false
        }
        _ => true,
    });
    taken
}

/// Drop other subcommands' keys so one manifest can seed any command.
fn drop_foreign(entries: &mut Vec<(String, String)>, own: &str) {
    for other in ["feasibility", "simulate", "sweep"] {
        if other != own {
            take_prefixed(entries, other);
        }
    }
}

fn reject_unknown(section: &str, keys: &BTreeMap<String, String>, known: &[&str]) -> Outcome<()> {
    match keys.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(usage(format!("unknown configuration key `{section}.{k}`"))),
        None => Ok(()),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Outcome<T> {
    value
        .parse()
        .map_err(|_| usage(format!("invalid value `{value}` for `{key}`")))
}

fn scenario(
    cli: &Cli,
    mut entries: Vec<(String, String)>,
    args: &ScenarioArgs,
) -> Outcome<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        entries.push((k.trim().to_string(), v.trim().to_string()));
    }
    apply_entries(&mut cfg, &entries)?;
    if let Some(n) = args.sbs {
        cfg.n_sbs = n;
    }
    if let Some(n) = args.users {
        cfg.n_users = n;
    }
    if let Some(v) = args.speed_kmh {
        cfg.mobility.mean_speed = v / 3.6;
    }
    if let Some(h) = args.hurst {
        cfg.mobility.model = MobilityModel::Fbm { hurst: h };
    }
    if let Some(a) = args.levy_alpha {
        cfg.mobility.model = MobilityModel::Levy { alpha: a };
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(d) = args.duration {
        cfg.duration = d;
    }
    if args.one_beam {
        cfg.one_beam_only = true;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_mode(s: &str) -> Outcome<AntennaMode> {
    match s {
        "omni" => Ok(AntennaMode::omni()),
        "directional" => Ok(AntennaMode::directional_3x3()),
        _ => Err(usage(format!("unknown mode `{s}` (omni or directional)"))),
    }
}

fn parse_modes(s: &str) -> Outcome<Vec<AntennaMode>> {
    match s {
        "both" => Ok(default_modes()),
        other => Ok(vec![parse_mode(other)?]),
    }
}

/// `start:stop:step` (inclusive of stop) or `a,b,c`.
pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| -> Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{t}` is not a number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("bad range `{s}`: need start ≤ stop and step > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("bad value list `{s}`")),
    };
    if values.is_empty() {
        return Err("empty value list".into());
    }
    Ok(values)
}

fn ensure_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// `5e-6` → `5`, for keys such as `andot_5uW`.
fn microwatt_label(watts: f64) -> String {
    let uw = (watts * 1e6 * 1e6).round() / 1e6;
    uw.to_string()
}

fn scenario_snapshot(cfg: &ScenarioConfig) -> BTreeMap<String, String> {
    to_entries(cfg).into_iter().collect()
}

fn cmd_feasibility(
    cli: &Cli,
    args: &FeasibilityArgs,
    mut entries: Vec<(String, String)>,
) -> Outcome<(BTreeMap<String, String>, Vec<String>)> {
    drop_foreign(&mut entries, "feasibility");
    let own = take_prefixed(&mut entries, "feasibility");
    reject_unknown(
        "feasibility",
        &own,
        &[
            "bands_hz",
            "consumed_uw",
            "autonomy_min",
            "apply_efficiency",
            "reference_distance_m",
        ],
    )?;
    let mut cfg = ScenarioConfig::default();
    apply_entries(&mut cfg, &entries)?;
    if let Some(seed) = cli.seed {
        apply_entry(&mut cfg, "sim.seed", &seed.to_string())?;
    }

    let mut opts = FeasibilityOptions {
        rx: cfg.rx,
        rule: cfg.rule,
        ..Default::default()
    };
    let mut bands = default_band_plan();
    if let Some(v) = own.get("bands_hz") {
        bands = v
            .split(',')
            .map(|f| {
                parse_value::<f64>("feasibility.bands_hz", f.trim())
                    .and_then(|hz| RadioBand::new(hz).map_err(Failure::from))
            })
            .collect::<Outcome<_>>()?;
    }
    if let Some(v) = own.get("consumed_uw") {
        opts.profile.consumed_power = parse_value::<f64>("feasibility.consumed_uw", v)? / 1e6;
    }
    if let Some(v) = own.get("autonomy_min") {
        opts.profile.autonomy_target = parse_value::<f64>("feasibility.autonomy_min", v)? * 60.0;
    }
    if let Some(v) = own.get("apply_efficiency") {
        opts.apply_conversion_efficiency = parse_value("feasibility.apply_efficiency", v)?;
    }
    if let Some(v) = own.get("reference_distance_m") {
        opts.reference_distance = parse_value("feasibility.reference_distance_m", v)?;
    }

    if let Some(path) = &args.bands {
        let file =
            File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        bands = read_band_plan(file)?;
    }
    if let Some(uw) = args.consumed_uw {
        opts.profile.consumed_power = uw / 1e6;
    }
    if let Some(min) = args.autonomy_min {
        opts.profile.autonomy_target = min * 60.0;
    }
    if args.apply_efficiency {
        opts.apply_conversion_efficiency = true;
    }

    let rows = feasibility_table(&bands, &default_modes(), &opts)?;
    ensure_dir(&cli.out_dir)?;
    write_csv(&rows, create(&cli.out_dir.join("feasibility.csv"))?)?;
    write_json(&cli.out_dir.join("feasibility.json"), &rows)?;
    let mut outputs = vec![
        "feasibility.csv".to_string(),
        "feasibility.json".to_string(),
    ];

    for r in &rows {
        let support = match r.support_time_s.minutes() {
            Some(m) => format!("{m:.2} min"),
            None => "N/A".into(),
        };
        println!(
            "{:>7.0} MHz {:<11} radius {:>6.2} m  P(10 m) {:>7.2} uW  replenish {:>7.1} %  support {}",
            r.band_hz / 1e6,
            r.mode.as_str(),
            r.energy_radius_m,
            r.harvested_power_at_ref_w * 1e6,
            r.replenishment_rate_pct,
            support
        );
    }

    if args.check_paper {
        let check = reference::compare(&rows, 0.01, 0.02)?;
        println!(
            "max relative deviation {:.3}% (support times {:.3}%)",
            check.max_relative_deviation * 100.0,
            check.max_support_time_deviation * 100.0
        );
        for c in check.failures() {
            println!(
                "MISMATCH {} MHz {} {}: computed {:?}, printed {:?}",
                c.band_mhz, c.mode, c.quantity, c.computed, c.reference
            );
        }
        write_json(&cli.out_dir.join("feasibility_check.json"), &check)?;
        outputs.push("feasibility_check.json".into());
    }

    let mut config = scenario_snapshot(&cfg);
    let hz: Vec<String> = bands
        .iter()
        .map(|b| b.center_frequency_hz().to_string())
        .collect();
    config.insert("feasibility.bands_hz".into(), hz.join(","));
    config.insert(
        "feasibility.consumed_uw".into(),
        (opts.profile.consumed_power * 1e6).to_string(),
    );
    config.insert(
        "feasibility.autonomy_min".into(),
        (opts.profile.autonomy_target / 60.0).to_string(),
    );
    config.insert(
        "feasibility.apply_efficiency".into(),
        opts.apply_conversion_efficiency.to_string(),
    );
    config.insert(
        "feasibility.reference_distance_m".into(),
        opts.reference_distance.to_string(),
    );
    Ok((config, outputs))
}

fn summary_json(cfg: &ScenarioConfig, metrics: &SimMetrics) -> Value {
    let mut summary = serde_json::Map::new();
    summary.insert("mode".into(), json!(cfg.mode.kind().as_str()));
    summary.insert("n_sbs".into(), json!(cfg.n_sbs));
    summary.insert("n_users".into(), json!(cfg.n_users));
    summary.insert("mobility".into(), json!(cfg.mobility.model.label()));
    summary.insert("one_beam_only".into(), json!(cfg.one_beam_only));
    summary.insert("master_seed".into(), json!(cfg.master_seed));
    summary.insert("replications".into(), json!(metrics.replications));
    summary.insert(
        "steps_per_replication".into(),
        json!(metrics.steps_per_replication),
    );
    for r in &metrics.per_rate {
        let label = microwatt_label(r.discharge_rate);
        summary.insert(format!("andot_{label}uW"), json!(r.andot_mean));
        summary.insert(format!("andot_{label}uW_std"), json!(r.andot_std));
    }
    summary.insert("rates".into(), json!(metrics.per_rate));
    summary.insert(
        "receiving_fraction".into(),
        json!(metrics.receiving_fraction),
    );
    if let Ok(cdf) = energy_cdf(metrics) {
        summary.insert(
            "energy_per_second".into(),
            json!({
                "users": cdf.len(),
                "median": cdf.median(),
                "iqr": cdf.iqr(),
            }),
        );
    }
    summary.insert("regulatory_audit".into(), json!(metrics.audit));
    Value::Object(summary)
}

fn cmd_simulate(
    cli: &Cli,
    args: &SimulateArgs,
    mut entries: Vec<(String, String)>,
) -> Outcome<(BTreeMap<String, String>, Vec<String>)> {
    drop_foreign(&mut entries, "simulate");
    let own = take_prefixed(&mut entries, "simulate");
    reject_unknown(
        "simulate",
        &own,
        &["dump_deployment", "dump_trajectories", "trajectory_stride"],
    )?;
    let mut dump_deployment = false;
    let mut dump_trajectories = false;
    let mut stride = 100usize;
    if let Some(v) = own.get("dump_deployment") {
        dump_deployment = parse_value("simulate.dump_deployment", v)?;
    }
    if let Some(v) = own.get("dump_trajectories") {
        dump_trajectories = parse_value("simulate.dump_trajectories", v)?;
    }
    if let Some(v) = own.get("trajectory_stride") {
        stride = parse_value("simulate.trajectory_stride", v)?;
    }
    dump_deployment |= args.dump_deployment;
    dump_trajectories |= args.dump_trajectories;
    if let Some(s) = args.trajectory_stride {
        stride = s;
    }

    let mut cfg = scenario(cli, entries, &args.scenario)?;
    if let Some(m) = &args.mode {
        cfg.mode = parse_mode(m)?;
    }
    cfg.validate()?;

    let metrics = run_simulation(&cfg)?;
    ensure_dir(&cli.out_dir)?;
    let mut outputs = Vec::new();
    write_json(
        &cli.out_dir.join("summary.json"),
        &summary_json(&cfg, &metrics),
    )?;
    outputs.push("summary.json".to_string());
    match energy_cdf(&metrics) {
        Ok(cdf) => {
            cdf.write_csv(create(&cli.out_dir.join("energy_cdf.csv"))?)?;
            outputs.push("energy_cdf.csv".into());
        }
        Err(Error::EmptySamples) => {
            eprintln!("note: no user ever received power; energy_cdf.csv skipped")
        }
        Err(e) => return Err(e.into()),
    }
    if let Ok(cdf) = raw_energy_cdf(&metrics) {
        cdf.write_csv(create(&cli.out_dir.join("energy_cdf_raw.csv"))?)?;
        outputs.push("energy_cdf_raw.csv".into());
    }
    if dump_deployment || dump_trajectories {
        let (sbs, trajectories) = replication_layout(&cfg, 0)?;
        if dump_deployment {
            write_points_csv(&sbs, create(&cli.out_dir.join("deployment.csv"))?)?;
            outputs.push("deployment.csv".into());
        }
        if dump_trajectories {
            write_trajectories_csv(
                &trajectories,
                stride,
                create(&cli.out_dir.join("trajectories.csv"))?,
            )?;
            outputs.push("trajectories.csv".into());
        }
    }

    for r in &metrics.per_rate {
        println!(
            "{} uW: ANDOT {:.4} ± {:.4}, outages {}",
            microwatt_label(r.discharge_rate),
            r.andot_mean,
            r.andot_std,
            r.outage_events
        );
    }

    let mut config = scenario_snapshot(&cfg);
    config.insert(
        "simulate.dump_deployment".into(),
        dump_deployment.to_string(),
    );
    config.insert(
        "simulate.dump_trajectories".into(),
        dump_trajectories.to_string(),
    );
    config.insert("simulate.trajectory_stride".into(), stride.to_string());
    Ok((config, outputs))
}

fn write_sweep_csvs(dir: &Path, points: &[SweepPoint], values: &[f64]) -> Outcome<Vec<String>> {
    // Axis values as the user gave them (speed in km/h).
    let shown = |i: usize| values[i % values.len()].to_string();

    let mut andot = csv::Writer::from_writer(create(&dir.join("sweep_andot.csv"))?);
    andot
        .write_record([
            "axis_value",
            "mode",
            "discharge_rate",
            "andot_mean",
            "andot_std",
        ])
        .map_err(Error::from)?;
    let mut outage = csv::Writer::from_writer(create(&dir.join("sweep_outage.csv"))?);
    outage
        .write_record([
            "axis_value",
            "mode",
            "discharge_rate",
            "outage_events",
            "outage_time_s",
            "mean_outage_duration_s",
        ])
        .map_err(Error::from)?;
    let mut energy = csv::Writer::from_writer(create(&dir.join("sweep_energy.csv"))?);
    energy
        .write_record([
            "axis_value",
            "mode",
            "users",
            "median",
            "iqr",
            "receiving_fraction",
        ])
        .map_err(Error::from)?;

    for (i, p) in points.iter().enumerate() {
        let x = shown(i);
        for r in &p.metrics.per_rate {
            andot
                .write_record([
                    x.clone(),
                    p.mode.to_string(),
                    r.discharge_rate.to_string(),
                    r.andot_mean.to_string(),
                    r.andot_std.to_string(),
                ])
                .map_err(Error::from)?;
            outage
                .write_record([
                    x.clone(),
                    p.mode.to_string(),
                    r.discharge_rate.to_string(),
                    r.outage_events.to_string(),
                    r.outage_time_s.to_string(),
                    r.mean_outage_duration_s.to_string(),
                ])
                .map_err(Error::from)?;
        }
        let (n, median, iqr) = match energy_cdf(&p.metrics) {
            Ok(c) => (
                c.len().to_string(),
                c.median().to_string(),
                c.iqr().to_string(),
            ),
            Err(_) => ("0".into(), String::new(), String::new()),
        };
        energy
            .write_record([
                x,
                p.mode.to_string(),
                n,
                median,
                iqr,
                p.metrics.receiving_fraction.to_string(),
            ])
            .map_err(Error::from)?;
    }
    andot.flush()?;
    outage.flush()?;
    energy.flush()?;
    Ok(vec![
        "sweep_andot.csv".into(),
        "sweep_outage.csv".into(),
        "sweep_energy.csv".into(),
    ])
}

fn cmd_sweep(
    cli: &Cli,
    args: &SweepArgs,
    mut entries: Vec<(String, String)>,
) -> Outcome<(BTreeMap<String, String>, Vec<String>)> {
    drop_foreign(&mut entries, "sweep");
    let own = take_prefixed(&mut entries, "sweep");
    reject_unknown("sweep", &own, &["axis", "values", "modes"])?;
    let axis_name = args
        .axis
        .clone()
        .or_else(|| own.get("axis").cloned())
        .ok_or_else(|| usage("sweep needs --axis (sbs, speed or users)"))?;
    let axis: SweepAxis = axis_name.parse()?;
    let values_text = args
        .values
        .clone()
        .or_else(|| own.get("values").cloned())
        .ok_or_else(|| usage("sweep needs --values"))?;
    let values = parse_values(&values_text).map_err(usage)?;
    let modes_text = args
        .modes
        .clone()
        .or_else(|| own.get("modes").cloned())
        .unwrap_or_else(|| "both".into());
    let modes = parse_modes(&modes_text)?;

    let cfg = scenario(cli, entries, &args.scenario)?;
    let engine_values: Vec<f64> = match axis {
        SweepAxis::UserSpeed => values.iter().map(|v| v / 3.6).collect(),
        _ => values.clone(),
    };
    let points = sweep(&cfg, axis, &engine_values, &modes)?;
    ensure_dir(&cli.out_dir)?;
    let outputs = write_sweep_csvs(&cli.out_dir, &points, &values)?;

    for (i, p) in points.iter().enumerate() {
        let first = &p.metrics.per_rate[0];
        println!(
            "{}={} {}: ANDOT({} uW) {:.4}",
            axis.name(),
            values[i % values.len()],
            p.mode,
            microwatt_label(first.discharge_rate),
            first.andot_mean
        );
    }

    let mut config = scenario_snapshot(&cfg);
    config.insert("sweep.axis".into(), axis.name().into());
    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    config.insert("sweep.values".into(), shown.join(","));
    config.insert("sweep.modes".into(), modes_text);
    Ok((config, outputs))
}
