//! Link-budget table for the default band plan, checked against the
//! published reference values.
//!
//!     cargo run --example feasibility_table

use rfcharge::feasibility::{
    default_band_plan, default_modes, feasibility_table, reference, FeasibilityOptions,
};

fn main() -> rfcharge::Result<()> {
    let rows = feasibility_table(
        &default_band_plan(),
        &default_modes(),
        &FeasibilityOptions::default(),
    )?;

    println!(
        "{:>8} {:<11} {:>9} {:>11} {:>10} {:>10} {:>12}",
        "MHz", "mode", "R_E [m]", "P@10m [uW]", "replen %", "R+ [m]", "support [min]"
    );
    for r in &rows {
        let support = r
            .support_time_s
            .minutes()
            .map_or_else(|| "N/A".to_string(), |m| format!("{m:.2}"));
        println!(
            "{:>8.0} {:<11} {:>9.2} {:>11.2} {:>10.1} {:>10.2} {:>12}",
            r.band_hz / 1e6,
            r.mode.as_str(),
            r.energy_radius_m,
            r.harvested_power_at_ref_w * 1e6,
            r.replenishment_rate_pct,
            r.energy_positive_range_m,
            support
        );
    }

    let check = reference::compare(&rows, 0.01, 0.02)?;
    println!(
        "\nagainst the printed table: max deviation {:.2}% (support times {:.2}%)",
        check.max_relative_deviation * 100.0,
        check.max_support_time_deviation * 100.0
    );
    for c in check.failures() {
        println!(
            "  differs: {} MHz {} {} computed {:.2?} printed {:.2?}",
            c.band_mhz, c.mode, c.quantity, c.computed, c.reference
        );
    }
    Ok(())
}
