//! Received power against distance at 915 MHz, the conducted-power rule for
//! high-gain antennas, and the 3x3 array's off-axis pattern.
//!
//!     cargo run --example link_budget

use rfcharge::linkbudget::{
    energy_radius, max_conducted_power, off_axis_factor, received_power, watt_to_dbm, AntennaMode,
    RadioBand, ReceiverConfig, RegulatoryRule,
};

fn main() -> rfcharge::Result<()> {
    let band = RadioBand::mhz(915.0)?;
    let rule = RegulatoryRule::default();
    let rx = ReceiverConfig::default();
    let lambda = band.wavelength();

    println!("conducted power limit by antenna gain:");
    for g in [0.0, 6.0, 9.0, 12.0, 14.51, 18.0, 24.0] {
        let p = max_conducted_power(g, &rule);
        println!("  {g:>6.2} dBi -> {:.3} W ({:.1} dBm)", p, watt_to_dbm(p)?);
    }
    println!(
        "  up to {} simultaneous beams, aggregate within +{} dB",
        rule.max_beams(),
        rule.aggregate_headroom_db
    );

    for mode in [AntennaMode::omni(), AntennaMode::directional_3x3()] {
        let p_tx = max_conducted_power(mode.tx_gain_dbi(), &rule);
        let g_tx = mode.tx_gain_linear();
        let radius = energy_radius(p_tx, g_tx, rx.rx_gain_linear(), lambda, rx.sensitivity)?;
        println!("\n{mode:?}\n  energy radius {radius:.2} m");
        for d in [1.0, 5.0, 10.0, 20.0, 30.0, radius] {
            let p = received_power(p_tx, g_tx, rx.rx_gain_linear(), lambda, d)?;
            println!(
                "  {d:>6.2} m: {:>9.2} uW ({:>6.2} dBm)",
                p * 1e6,
                watt_to_dbm(p)?
            );
        }
    }

    println!("\noff-axis power factor, 3 elements per side:");
    for deg in [
        0.0_f64, 5.0, 10.0, 20.0, 30.0, 45.0, 60.0, 90.0, 120.0, 180.0,
    ] {
        let af = off_axis_factor(3, deg.to_radians());
        println!("  {deg:>5.0} deg: {af:.4}");
    }
    Ok(())
}
