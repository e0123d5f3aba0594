//! Distribution over users of the power stored while charging, for each
//! mobility setting, omni and directional.
//!
//!     cargo run --release --example energy_cdf [replications] [duration_s] [csv-prefix]

use std::fs::File;

use rfcharge::linkbudget::AntennaMode;
use rfcharge::mobility::MobilityModel;
use rfcharge::simengine::{energy_cdf, run_batch, ScenarioConfig};

fn main() -> rfcharge::Result<()> {
    let mut args = std::env::args().skip(1);
    let replications = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let duration = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000.0);
    let prefix = args.next();

    let mut cfgs = Vec::new();
    for model in [
        MobilityModel::Fbm { hurst: 0.1 },
        MobilityModel::Fbm { hurst: 0.5 },
        MobilityModel::Fbm { hurst: 0.9 },
        MobilityModel::Levy { alpha: 1.5 },
    ] {
        for mode in [AntennaMode::omni(), AntennaMode::directional_3x3()] {
            let mut cfg = ScenarioConfig {
                mode,
                replications,
                duration,
                ..Default::default()
            };
            cfg.mobility.model = model;
            cfgs.push(cfg);
        }
    }
    let results = run_batch(&cfgs)?;

    println!(
        "{:<12} {:<11} {:>6} {:>8} {:>8} {:>8} {:>8}",
        "mobility", "mode", "users", "p10 uW", "median", "p90", "IQR"
    );
    for (cfg, m) in cfgs.iter().zip(&results) {
        let Ok(cdf) = energy_cdf(m) else {
            println!(
                "{:<12} {:<11} nobody charged",
                cfg.mobility.model.label(),
                cfg.mode.kind()
            );
            continue;
        };
        println!(
            "{:<12} {:<11} {:>6} {:>8.2} {:>8.2} {:>8.2} {:>8.2}",
            cfg.mobility.model.label(),
            cfg.mode.kind().as_str(),
            cdf.len(),
            cdf.quantile(0.1) * 1e6,
            cdf.median() * 1e6,
            cdf.quantile(0.9) * 1e6,
            cdf.iqr() * 1e6
        );
        if let Some(prefix) = &prefix {
            let slug: String = cfg
                .mobility
                .model
                .label()
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                .collect();
            let path = format!("{prefix}_{slug}_{}.csv", cfg.mode.kind());
            cdf.write_csv(File::create(&path)?)?;
        }
    }
    Ok(())
}
