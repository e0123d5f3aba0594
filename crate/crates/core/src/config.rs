//! Flat key-value scenario files.
//!
//! ```text
//! # comment
//! [sbs]
//! count = 30
//! antenna.mode = directional   # dotted keys work outside sections too
//! ```
//!
//! A `[section]` header prefixes the keys that follow it, so `count` above
//! becomes `sbs.count`. Every key has a default; an empty file is valid.

use std::fmt::Display;
use std::str::FromStr;

use crate::charging::ClusterPolicy;
use crate::error::{config, Error, Result};
use crate::linkbudget::{
    dbm_to_watt, watt_to_dbm, AntennaMode, RadioBand, ReductionVariant, StepMode,
};
use crate::mobility::MobilityModel;
use crate::simengine::ScenarioConfig;

/// Parse key-value text into ordered `(key, value)` pairs.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config(format!("line {}: unterminated section header", n + 1)))?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config(format!("line {}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(config(format!("line {}: empty key", n + 1)));
        }
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        out.push((full, value.trim().to_string()));
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse::<f64>(key, v.trim()))
        .collect()
}

fn directional_fields(mode: &AntennaMode) -> (usize, f64, f64, f64) {
    match *mode {
        AntennaMode::Directional {
            elements_per_side,
            element_gain_dbi,
            array_gain_dbi,
            beam_width,
        } => (
            elements_per_side,
            element_gain_dbi,
            array_gain_dbi,
            beam_width,
        ),
        AntennaMode::Omni { .. } => {
            let AntennaMode::Directional {
                elements_per_side,
                element_gain_dbi,
                array_gain_dbi,
                beam_width,
            } = AntennaMode::directional_3x3()
            else {
                unreachable!()
            };
            (
                elements_per_side,
                element_gain_dbi,
                array_gain_dbi,
                beam_width,
            )
        }
    }
}

/// Every recognised key, in the order [`to_entries`] writes them.
pub const KEYS: &[&str] = &[
    "area.width",
    "area.height",
    "sbs.count",
    "sbs.interaction_radius",
    "sbs.interaction_gamma",
    "sbs.burn_in_sweeps",
    "users.count",
    "mobility.model",
    "mobility.hurst",
    "mobility.alpha",
    "mobility.speed_kmh",
    "mobility.time_step",
    "radio.band_hz",
    "antenna.mode",
    "antenna.omni_gain_dbi",
    "antenna.elements_per_side",
    "antenna.element_gain_dbi",
    "antenna.array_gain_dbi",
    "antenna.beam_width_deg",
    "regulatory.base_limit_dbm",
    "regulatory.gain_threshold_dbi",
    "regulatory.reduction",
    "regulatory.step_mode",
    "regulatory.aggregate_headroom_db",
    "receiver.gain_dbi",
    "receiver.sensitivity_dbm",
    "receiver.efficiency",
    "scheduler.policy",
    "scheduler.shadow_epsilon_deg",
    "scheduler.cross_cluster_spillover",
    "battery.capacity_j",
    "battery.discharge_rates_uw",
    "battery.charging_threshold_j",
    "sim.duration_s",
    "sim.replications",
    "sim.one_beam_only",
    "sim.seed",
    "sim.min_link_distance_m",
    "sim.raw_sample_stride",
];

/// Hurst exponent / tail index kept when switching model kinds.
#[derive(Debug, Clone, Copy)]
struct ModelParams {
    hurst: f64,
    alpha: f64,
    levy: bool,
}

/// Apply one key to `cfg`. Unknown keys are an error naming the key.
pub fn apply_entry(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    let mut model = match cfg.mobility.model {
        MobilityModel::Fbm { hurst } => ModelParams {
            hurst,
            alpha: 1.5,
            levy: false,
        },
        MobilityModel::Levy { alpha } => ModelParams {
            hurst: 0.9,
            alpha,
            levy: true,
        },
    };
    let omni_gain = match cfg.mode {
        AntennaMode::Omni { gain_dbi } => gain_dbi,
        _ => AntennaMode::omni().tx_gain_dbi(),
    };
    let (mut n_el, mut el_gain, mut arr_gain, mut bw) = directional_fields(&cfg.mode);
    let mut directional = matches!(cfg.mode, AntennaMode::Directional { .. });
    let mut omni_gain_new = omni_gain;

    match key {
        "area.width" => cfg.area.width = parse(key, value)?,
        "area.height" => cfg.area.height = parse(key, value)?,
        "sbs.count" => cfg.n_sbs = parse(key, value)?,
        "sbs.interaction_radius" => cfg.deployment.interaction_radius = parse(key, value)?,
        "sbs.interaction_gamma" => cfg.deployment.interaction_gamma = parse(key, value)?,
        "sbs.burn_in_sweeps" => cfg.deployment.burn_in_sweeps = parse(key, value)?,
        "users.count" => cfg.n_users = parse(key, value)?,
        "mobility.model" => {
            model.levy = match value {
                "fbm" => false,
                "levy" => true,
                _ => {
                    return Err(config(format!(
                        "invalid value `{value}` for `{key}` (fbm|levy)"
                    )))
                }
            }
        }
        "mobility.hurst" => model.hurst = parse(key, value)?,
        "mobility.alpha" => model.alpha = parse(key, value)?,
        "mobility.speed_kmh" => cfg.mobility.mean_speed = parse::<f64>(key, value)? / 3.6,
        "mobility.time_step" => cfg.mobility.time_step = parse(key, value)?,
        "radio.band_hz" => {
            cfg.band = RadioBand::new(parse(key, value)?).map_err(|e| config(e.to_string()))?
        }
        "antenna.mode" => {
            directional = match value {
                "omni" => false,
                "directional" => true,
                _ => {
                    return Err(config(format!(
                        "invalid value `{value}` for `{key}` (omni|directional)"
                    )))
                }
            }
        }
        "antenna.omni_gain_dbi" => omni_gain_new = parse(key, value)?,
        "antenna.elements_per_side" => n_el = parse(key, value)?,
        "antenna.element_gain_dbi" => el_gain = parse(key, value)?,
        "antenna.array_gain_dbi" => arr_gain = parse(key, value)?,
        "antenna.beam_width_deg" => bw = parse::<f64>(key, value)?.to_radians(),
        "regulatory.base_limit_dbm" => cfg.rule.base_limit_dbm = parse(key, value)?,
        "regulatory.gain_threshold_dbi" => cfg.rule.gain_threshold_dbi = parse(key, value)?,
        "regulatory.reduction" => {
            cfg.rule.reduction_variant = match value {
                "one_db_per_three_dbi" => ReductionVariant::OneDbPerThreeDbi,
                "one_db_per_one_dbi" => ReductionVariant::OneDbPerOneDbi,
                _ => return Err(config(format!("invalid value `{value}` for `{key}`"))),
            }
        }
        "regulatory.step_mode" => {
            cfg.rule.step_mode = match value {
                "floor" => StepMode::FloorSteps,
                "continuous" => StepMode::Continuous,
                _ => return Err(config(format!("invalid value `{value}` for `{key}`"))),
            }
        }
        "regulatory.aggregate_headroom_db" => cfg.rule.aggregate_headroom_db = parse(key, value)?,
        "receiver.gain_dbi" => cfg.rx.rx_gain_dbi = parse(key, value)?,
        "receiver.sensitivity_dbm" => {
            cfg.rx.sensitivity =
                dbm_to_watt(parse(key, value)?).map_err(|e| config(e.to_string()))?
        }
        "receiver.efficiency" => cfg.rx.conversion_efficiency = parse(key, value)?,
        "scheduler.policy" => {
            cfg.scheduler.policy = match value {
                "time_divided" => ClusterPolicy::TimeDivided,
                "wide_beam" => ClusterPolicy::WideBeam,
                _ => return Err(config(format!("invalid value `{value}` for `{key}`"))),
            }
        }
        "scheduler.shadow_epsilon_deg" => {
            cfg.scheduler.shadow_epsilon = parse::<f64>(key, value)?.to_radians()
        }
        "scheduler.cross_cluster_spillover" => {
            cfg.scheduler.cross_cluster_spillover = parse_bool(key, value)?
        }
        "battery.capacity_j" => cfg.capacity = parse(key, value)?,
        "battery.discharge_rates_uw" => {
            cfg.discharge_rates = parse_list(key, value)?
                .into_iter()
                .map(|v| v / 1e6)
                .collect()
        }
        "battery.charging_threshold_j" => cfg.charging_threshold = parse(key, value)?,
        "sim.duration_s" => cfg.duration = parse(key, value)?,
        "sim.replications" => cfg.replications = parse(key, value)?,
        "sim.one_beam_only" => cfg.one_beam_only = parse_bool(key, value)?,
        "sim.seed" => cfg.master_seed = parse(key, value)?,
        "sim.min_link_distance_m" => cfg.min_link_distance = parse(key, value)?,
        "sim.raw_sample_stride" => cfg.raw_sample_stride = parse(key, value)?,
        _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
    }

    cfg.mobility.model = if model.levy {
        MobilityModel::Levy { alpha: model.alpha }
    } else {
        MobilityModel::Fbm { hurst: model.hurst }
    };
    cfg.mode = if directional {
        AntennaMode::Directional {
            elements_per_side: n_el,
            element_gain_dbi: el_gain,
            array_gain_dbi: arr_gain,
            beam_width: bw,
        }
    } else {
        AntennaMode::Omni {
            gain_dbi: omni_gain_new,
        }
    };
    Ok(())
}

/// Kind selectors go first so that model- and mode-specific keys land on
/// the selected variant whatever order the file lists them in.
const SELECTORS: [&str; 2] = ["mobility.model", "antenna.mode"];

pub fn apply_entries(cfg: &mut ScenarioConfig, entries: &[(String, String)]) -> Result<()> {
    let (first, rest): (Vec<_>, Vec<_>) = entries
        .iter()
        .partition(|(k, _)| SELECTORS.contains(&k.as_str()));
    for (k, v) in first.into_iter().chain(rest) {
        apply_entry(cfg, k, v)?;
    }
    Ok(())
}

/// Parse a scenario file on top of the defaults.
pub fn scenario_from_str(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    apply_entries(&mut cfg, &parse_entries(text)?)?;
    Ok(cfg)
}

fn s(v: impl Display) -> String {
    v.to_string()
}

/// Full snapshot of `cfg` as key-value pairs; feeding them back through
/// [`apply_entries`] reproduces `cfg` exactly.
pub fn to_entries(cfg: &ScenarioConfig) -> Vec<(String, String)> {
    let (model, hurst, alpha) = match cfg.mobility.model {
        MobilityModel::Fbm { hurst } => ("fbm", hurst, 1.5),
        MobilityModel::Levy { alpha } => ("levy", 0.9, alpha),
    };
    let (n_el, el_gain, arr_gain, bw) = directional_fields(&cfg.mode);
    let (mode, omni_gain) = match cfg.mode {
        AntennaMode::Omni { gain_dbi } => ("omni", gain_dbi),
        AntennaMode::Directional { .. } => ("directional", AntennaMode::omni().tx_gain_dbi()),
    };
    let values = vec![
        s(cfg.area.width),
        s(cfg.area.height),
        s(cfg.n_sbs),
        s(cfg.deployment.interaction_radius),
        s(cfg.deployment.interaction_gamma),
        s(cfg.deployment.burn_in_sweeps),
        s(cfg.n_users),
        s(model),
        s(hurst),
        s(alpha),
        s(cfg.mobility.mean_speed * 3.6),
        s(cfg.mobility.time_step),
        s(cfg.band.center_frequency_hz()),
        s(mode),
        s(omni_gain),
        s(n_el),
        s(el_gain),
        s(arr_gain),
        s(bw.to_degrees()),
        s(cfg.rule.base_limit_dbm),
        s(cfg.rule.gain_threshold_dbi),
        s(match cfg.rule.reduction_variant {
            ReductionVariant::OneDbPerThreeDbi => "one_db_per_three_dbi",
            ReductionVariant::OneDbPerOneDbi => "one_db_per_one_dbi",
        }),
        s(match cfg.rule.step_mode {
            StepMode::FloorSteps => "floor",
            StepMode::Continuous => "continuous",
        }),
        s(cfg.rule.aggregate_headroom_db),
        s(cfg.rx.rx_gain_dbi),
        s(watt_to_dbm(cfg.rx.sensitivity).unwrap_or(f64::INFINITY)),
        s(cfg.rx.conversion_efficiency),
        s(match cfg.scheduler.policy {
            ClusterPolicy::TimeDivided => "time_divided",
            ClusterPolicy::WideBeam => "wide_beam",
        }),
        s(cfg.scheduler.shadow_epsilon.to_degrees()),
        s(cfg.scheduler.cross_cluster_spillover),
        s(cfg.capacity),
        cfg.discharge_rates
            .iter()
            .map(|r| s(r * 1e6))
            .collect::<Vec<_>>()
            .join(","),
        s(cfg.charging_threshold),
        s(cfg.duration),
        s(cfg.replications),
        s(cfg.one_beam_only),
        s(cfg.master_seed),
        s(cfg.min_link_distance),
        s(cfg.raw_sample_stride),
    ];
    KEYS.iter().map(|k| k.to_string()).zip(values).collect()
}

/// Render entries as a key-value file.
pub fn render(entries: &[(String, String)]) -> String {
    entries
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(scenario_from_str("").unwrap(), ScenarioConfig::default());
        assert_eq!(
            scenario_from_str("# only a comment\n\n").unwrap(),
            ScenarioConfig::default()
        );
    }

    #[test]
    fn sections_prefix_keys() {
        let cfg = scenario_from_str(
            "[sbs]\ncount = 30\n[mobility]\nmodel = levy\nalpha = 1.6 # tail\n[antenna]\nmode = omni\n",
        )
        .unwrap();
        assert_eq!(cfg.n_sbs, 30);
        assert_eq!(cfg.mobility.model, MobilityModel::Levy { alpha: 1.6 });
        assert_eq!(cfg.mode, AntennaMode::omni());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = scenario_from_str("sim.bogus = 3").unwrap_err().to_string();
        assert!(err.contains("sim.bogus"), "{err}");
        assert!(scenario_from_str("sbs.count = many").is_err());
        assert!(scenario_from_str("just text").is_err());
        assert!(scenario_from_str("[open\n").is_err());
    }

    #[test]
    fn key_order_does_not_matter() {
        let cfg = scenario_from_str("mobility.alpha = 1.7\nmobility.model = levy\n").unwrap();
        assert_eq!(cfg.mobility.model, MobilityModel::Levy { alpha: 1.7 });
        let cfg = scenario_from_str("antenna.omni_gain_dbi = 3\nantenna.mode = omni\n").unwrap();
        assert_eq!(cfg.mode, AntennaMode::Omni { gain_dbi: 3.0 });
    }

    #[test]
    fn speed_in_kmh_and_rates_in_uw() {
        let cfg = scenario_from_str("mobility.speed_kmh = 3.6\nbattery.discharge_rates_uw = 5, 50")
            .unwrap();
        assert!((cfg.mobility.mean_speed - 1.0).abs() < 1e-12);
        assert_eq!(cfg.discharge_rates, vec![5e-6, 5e-5]);
    }

    #[test]
    fn snapshot_round_trips() {
        let mut cfg = ScenarioConfig {
            n_sbs: 27,
            ..Default::default()
        };
        cfg.mobility.model = MobilityModel::Fbm { hurst: 0.9 };
        cfg.mobility.mean_speed = 12.0 / 3.6;
        cfg.scheduler.policy = ClusterPolicy::WideBeam;
        cfg.rx.sensitivity = 2e-5;
        cfg.discharge_rates = vec![7e-6, 1.3e-4];
        let entries = to_entries(&cfg);
        assert_eq!(entries.len(), KEYS.len());
        let back = scenario_from_str(&render(&entries)).unwrap();
        assert_eq!(back.n_sbs, cfg.n_sbs);
        assert_eq!(back.mobility.model, cfg.mobility.model);
        assert_eq!(back.scheduler.policy, cfg.scheduler.policy);
        assert!((back.mobility.mean_speed / cfg.mobility.mean_speed - 1.0).abs() < 1e-15);
        assert!((back.rx.sensitivity / cfg.rx.sensitivity - 1.0).abs() < 1e-12);
        // A second round trip is exact.
        assert_eq!(
            to_entries(&back),
            to_entries(&scenario_from_str(&render(&to_entries(&back))).unwrap())
        );

        let mut omni = ScenarioConfig::default();
        omni.mode = AntennaMode::omni();
        assert_eq!(
            scenario_from_str(&render(&to_entries(&omni))).unwrap().mode,
            omni.mode
        );
    }
}
