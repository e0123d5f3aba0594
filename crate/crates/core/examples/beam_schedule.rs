//! One directional SBS and a handful of users: which users share a beam,
//! who is shadowed, how conducted power is split, and what each user
//! receives.
//!
//!     cargo run --example beam_schedule

use rfcharge::charging::{
    schedule_beams, ChargingModel, ClusterPolicy, ScheduleAudit, SchedulerConfig, UserPolar,
};
use rfcharge::deployment::{Area, Point};
use rfcharge::linkbudget::{AntennaMode, RadioBand, ReceiverConfig, RegulatoryRule};

fn main() -> rfcharge::Result<()> {
    let area = Area::default();
    let sbs = Point::new(250.0, 250.0);
    let users = [
        Point::new(262.0, 252.0),
        Point::new(270.0, 255.0), // close bearing to user 0
        Point::new(280.0, 255.0), // behind user 0
        Point::new(240.0, 270.0),
        Point::new(230.0, 240.0),
        Point::new(250.0, 222.0),
        Point::new(275.0, 228.0),
        Point::new(224.0, 262.0),
    ];
    let polar: Vec<UserPolar> = users
        .iter()
        .enumerate()
        .map(|(i, p)| UserPolar::locate(i, sbs, *p, &area))
        .collect();

    let mode = AntennaMode::directional_3x3();
    let rule = RegulatoryRule::default();
    for policy in [ClusterPolicy::TimeDivided, ClusterPolicy::WideBeam] {
        let sched = SchedulerConfig {
            policy,
            ..Default::default()
        };
        let model = ChargingModel::new(
            RadioBand::mhz(915.0)?,
            mode,
            ReceiverConfig::default(),
            rule,
            sched,
            1.0,
        )?;
        let in_range: Vec<UserPolar> = polar
            .iter()
            .copied()
            .filter(|u| u.radial <= model.energy_radius())
            .collect();
        let beams = schedule_beams(0, &in_range, &mode, &rule, &sched);
        println!("{policy:?}");
        for b in &beams {
            let ids: Vec<usize> = b.members.iter().map(|m| m.user_id).collect();
            println!(
                "  beam @ {:>6.1} deg, {:.2} dBi, {:.3} W (limit {:.3} W): users {ids:?}, shadowed {:?}",
                b.boresight.to_degrees(),
                b.gain_dbi,
                b.conducted_power,
                b.power_limit,
                b.shadowed
            );
        }
        let audit = ScheduleAudit::of(&beams, &rule);
        println!(
            "  {} beams, {:.3} W total, cap {:.3} W, complies: {}",
            audit.active_beams,
            audit.total_power,
            audit.aggregate_cap,
            audit.complies(&rule)
        );
        for u in &in_range {
            println!(
                "  user {} at {:>5.1} m, {:>6.1} deg: {:>8.2} uW",
                u.user_id,
                u.radial,
                u.angle.to_degrees(),
                model.directional_link(u, &beams) * 1e6
            );
        }
    }
    Ok(())
}
