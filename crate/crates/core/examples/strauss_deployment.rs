//! SBS layouts from the Strauss process for a range of interaction
//! strengths, with the number of close pairs each produces.
//!
//!     cargo run --release --example strauss_deployment [csv-out]

use std::fs::File;

use rfcharge::deployment::{close_pairs, sample_strauss, write_points_csv, Area, StraussConfig};

fn main() -> rfcharge::Result<()> {
    let area = Area::default();
    let n = 30;
    let r = 50.0;
    // Under complete spatial randomness each pair is close with probability
    // πr²/|A| on the torus.
    let pairs = (n * (n - 1) / 2) as f64;
    println!(
        "expected close pairs without interaction: {:.2}",
        pairs * std::f64::consts::PI * r * r / area.surface()
    );

    let mut last = Vec::new();
    for gamma in [1.0, 0.6, 0.3, 0.1, 0.0] {
        let mut counts = Vec::new();
        for seed in 0..20 {
            let cfg = StraussConfig {
                n_points: n,
                interaction_radius: r,
                interaction_gamma: gamma,
                burn_in_sweeps: 2_000,
                seed,
            };
            let points = sample_strauss(&cfg, &area)?;
            counts.push(close_pairs(&points, r, &area));
            last = points;
        }
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        println!(
            "gamma {gamma:.1}: mean close pairs {mean:.2} over {} layouts",
            counts.len()
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        write_points_csv(&last, File::create(&path)?)?;
        println!("hard-core layout written to {path}");
    }
    Ok(())
}
