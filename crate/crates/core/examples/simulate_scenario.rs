//! A full scenario run: 100 walking users, SBSs with directional charging,
//! three device consumption profiles.
//!
//!     cargo run --release --example simulate_scenario [sbs] [replications] [duration_s]

use rfcharge::linkbudget::AntennaMode;
use rfcharge::simengine::{energy_cdf, run_simulation, ScenarioConfig};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> rfcharge::Result<()> {
    let base = ScenarioConfig {
        n_sbs: arg(1, 30),
        replications: arg(2, 2),
        duration: arg(3, 20_000.0),
        ..Default::default()
    };
    for mode in [AntennaMode::omni(), AntennaMode::directional_3x3()] {
        let cfg = ScenarioConfig {
            mode,
            ..base.clone()
        };
        let m = run_simulation(&cfg)?;
        println!(
            "{} SBSs, {} ({} replications x {} s)",
            cfg.n_sbs,
            mode.kind(),
            m.replications,
            cfg.duration
        );
        for r in &m.per_rate {
            println!(
                "  {:>5.0} uW: ANDOT {:.3} ± {:.3}, {} outages, mean outage {:.0} s",
                r.discharge_rate * 1e6,
                r.andot_mean,
                r.andot_std,
                r.outage_events,
                r.mean_outage_duration_s
            );
        }
        if let Ok(cdf) = energy_cdf(&m) {
            println!(
                "  stored power while receiving: median {:.2} uW, IQR {:.2} uW; receiving {:.1}% of the time",
                cdf.median() * 1e6,
                cdf.iqr() * 1e6,
                m.receiving_fraction * 100.0
            );
        }
        println!(
            "  regulatory audit: {} schedules, {} violations, at most {} beams",
            m.audit.schedules_checked, m.audit.violations, m.audit.max_active_beams
        );
    }
    Ok(())
}
