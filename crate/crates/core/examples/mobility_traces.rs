//! The four mobility settings side by side: realised speed, how far users
//! get from where they started, and (optionally) the traces as CSV.
//!
//!     cargo run --release --example mobility_traces [csv-out]

use std::fs::File;

use rfcharge::deployment::{torus_delta, Area};
use rfcharge::mobility::{
    write_trajectories_csv, MobilityConfig, MobilityModel, TrajectoryGenerator,
};

fn main() -> rfcharge::Result<()> {
    let area = Area::default();
    let duration = 3_600.0;
    let models = [
        MobilityModel::Levy { alpha: 1.5 },
        MobilityModel::Fbm { hurst: 0.1 },
        MobilityModel::Fbm { hurst: 0.5 },
        MobilityModel::Fbm { hurst: 0.9 },
    ];
    let mut traces = Vec::new();
    for model in models {
        let cfg = MobilityConfig {
            model,
            ..Default::default()
        };
        let gen = TrajectoryGenerator::new(&cfg, duration, &area)?;
        let mut speed = 0.0;
        let mut spread = 0.0;
        let users = 20;
        for seed in 0..users {
            let t = gen.generate(seed)?;
            speed += t.mean_speed();
            // Straight-line distance after one hour, ignoring wrap-arounds.
            let (dx, dy) = torus_delta(t.positions[0], t.positions[t.positions.len() - 1], &area);
            spread += dx.hypot(dy);
            if seed == 0 {
                traces.push(t);
            }
        }
        println!(
            "{:<12} mean speed {:.3} km/h, start-to-end distance after 1 h {:>6.1} m",
            model.label(),
            speed / users as f64 * 3.6,
            spread / users as f64
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        // user_id 0..3 follow the order above.
        write_trajectories_csv(&traces, 10, File::create(&path)?)?;
        println!("traces written to {path}");
    }
    Ok(())
}
