//! ANDOT of a 5 uW device as the SBS count grows, omni against directional,
//! plus the nearest-SBS-only variant.
//!
//!     cargo run --release --example sbs_density_sweep [replications] [duration_s]

use rfcharge::linkbudget::{AntennaMode, ModeKind};
use rfcharge::simengine::{sweep, ScenarioConfig, SweepAxis};

fn main() -> rfcharge::Result<()> {
    let mut args = std::env::args().skip(1);
    let replications = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let duration = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000.0);
    let base = ScenarioConfig {
        replications,
        duration,
        discharge_rates: vec![5e-6],
        ..Default::default()
    };
    let counts = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
    let modes = [AntennaMode::omni(), AntennaMode::directional_3x3()];
    let multi = sweep(&base, SweepAxis::SbsDensity, &counts, &modes)?;
    let one_beam = ScenarioConfig {
        one_beam_only: true,
        ..base
    };
    let single = sweep(
        &one_beam,
        SweepAxis::SbsDensity,
        &counts,
        &[AntennaMode::directional_3x3()],
    )?;

    println!(
        "{:>5} {:>8} {:>12} {:>10} {:>10}",
        "SBSs", "omni", "directional", "one beam", "gain"
    );
    for (i, n) in counts.iter().enumerate() {
        let pick = |mode| {
            multi
                .iter()
                .find(|p| p.axis_value == *n && p.mode == mode)
                .map(|p| p.metrics.per_rate[0].andot_mean)
                .unwrap_or(f64::NAN)
        };
        let (omni, dir) = (pick(ModeKind::Omni), pick(ModeKind::Directional));
        println!(
            "{n:>5} {omni:>8.3} {dir:>12.3} {:>10.3} {:>+9.1}%",
            single[i].metrics.per_rate[0].andot_mean,
            (dir - omni) * 100.0
        );
    }
    Ok(())
}
