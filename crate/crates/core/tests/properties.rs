use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use rfcharge::charging::{
    schedule_beams, ScheduleAudit, SchedulerConfig, UserPolar, WearableState,
};
use rfcharge::deployment::{torus_distance, Area, Point};
use rfcharge::linkbudget::{
    cap_aggregate_beams, dbm_to_watt, energy_radius, max_conducted_power, off_axis_factor,
    received_power, watt_to_dbm, AntennaMode, ReductionVariant, RegulatoryRule, StepMode,
};
use rfcharge::simengine::EmpiricalCdf;

fn rule_strategy() -> impl Strategy<Value = RegulatoryRule> {
    (
        prop_oneof![
            Just(ReductionVariant::OneDbPerThreeDbi),
            Just(ReductionVariant::OneDbPerOneDbi)
        ],
        prop_oneof![Just(StepMode::FloorSteps), Just(StepMode::Continuous)],
        0.0..12.0f64,
    )
        .prop_map(|(reduction_variant, step_mode, headroom)| RegulatoryRule {
            reduction_variant,
            step_mode,
            aggregate_headroom_db: headroom,
            ..Default::default()
        })
}

fn point(area: &Area) -> impl Strategy<Value = Point> {
    (0.0..area.width, 0.0..area.height).prop_map(|(x, y)| Point { x, y })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn doubling_distance_quarters_power(
        p in 1e-3..10.0f64, g in 0.5..50.0f64, lambda in 0.03..3.0f64, d in 0.1..500.0f64,
    ) {
        let near = received_power(p, g, 1.0, lambda, d).unwrap();
        let far = received_power(p, g, 1.0, lambda, 2.0 * d).unwrap();
        prop_assert!((near / far - 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_radius_inverts_friis(
        p in 1e-3..10.0f64, g_tx in 0.5..50.0f64, g_rx in 0.5..5.0f64,
        lambda in 0.03..3.0f64, s_dbm in -40.0..0.0f64,
    ) {
        let s = dbm_to_watt(s_dbm).unwrap();
        let r = energy_radius(p, g_tx, g_rx, lambda, s).unwrap();
        let back = received_power(p, g_tx, g_rx, lambda, r).unwrap();
        prop_assert!((back / s - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn dbm_round_trip(dbm in -90.0..60.0f64) {
        prop_assert!((watt_to_dbm(dbm_to_watt(dbm).unwrap()).unwrap() - dbm).abs() < 1e-9);
    }

    #[test]
    fn conducted_limit_never_grows_with_gain(rule in rule_strategy(), a in -5.0..40.0f64, b in -5.0..40.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let base = dbm_to_watt(rule.base_limit_dbm).unwrap();
        prop_assert!(max_conducted_power(hi, &rule) <= max_conducted_power(lo, &rule));
        prop_assert!(max_conducted_power(hi, &rule) <= base * (1.0 + 1e-12));
        if hi <= rule.gain_threshold_dbi {
            prop_assert!((max_conducted_power(hi, &rule) / base - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn off_axis_factor_is_bounded_even_and_periodic(n in 1usize..16, phi in -TAU..TAU) {
        let f = off_axis_factor(n, phi);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - off_axis_factor(n, -phi)).abs() < 1e-9);
        prop_assert!((f - off_axis_factor(n, phi + TAU)).abs() < 1e-6);
    }

    #[test]
    fn beam_caps_hold(
        rule in rule_strategy(),
        requests in prop::collection::vec(0.0..2.0f64, 0..16),
        limit in 0.01..1.0f64,
    ) {
        let out = cap_aggregate_beams(&requests, limit, &rule);
        prop_assert_eq!(out.len(), requests.len());
        prop_assert!(out.iter().filter(|p| **p > 0.0).count() <= rule.max_beams());
        prop_assert!(out.iter().sum::<f64>() <= limit * rule.aggregate_factor() * (1.0 + 1e-12));
        for (o, r) in out.iter().zip(&requests) {
            prop_assert!(*o >= 0.0 && *o <= r.min(limit) + 1e-15);
        }
    }

    #[test]
    fn torus_distance_is_a_short_symmetric_metric(a in point(&Area::default()), b in point(&Area::default())) {
        let area = Area::default();
        let d = torus_distance(a, b, &area).unwrap();
        prop_assert_eq!(d, torus_distance(b, a, &area).unwrap());
        prop_assert!(d <= (a.x - b.x).hypot(a.y - b.y) + 1e-9);
        prop_assert!(d <= 0.5 * area.diagonal() + 1e-9);
        let shifted = Point { x: (a.x + 0.5 * area.width) % area.width, y: a.y };
        let shifted_b = Point { x: (b.x + 0.5 * area.width) % area.width, y: b.y };
        prop_assert!((torus_distance(shifted, shifted_b, &area).unwrap() - d).abs() < 1e-9);
    }

    #[test]
    fn battery_stays_within_capacity_and_balances(
        level_frac in 0.0..=1.0f64, p_rx in 0.0..1e-3f64, eta in 0.0..=1.0f64,
        rate in 1e-7..1e-3f64, dt in 0.1..10.0f64,
    ) {
        let cap = 1e-2;
        let s = WearableState::new(level_frac * cap, cap, rate).unwrap();
        let t = s.step(p_rx, eta, dt);
        prop_assert!((0.0..=cap).contains(&t.state.battery_level));
        let delta = t.state.battery_level - s.battery_level;
        let balance = t.harvested - t.consumed - t.overflow + t.shortfall;
        prop_assert!((delta - balance).abs() < 1e-15);
    }

    #[test]
    fn beam_schedule_is_compliant_and_exclusive(
        users in prop::collection::vec((1.0..34.0f64, 0.0..TAU), 0..40),
        wide in any::<bool>(),
    ) {
        let polar: Vec<UserPolar> = users
            .iter()
            .enumerate()
            .map(|(i, &(radial, angle))| UserPolar { user_id: i, radial, angle })
            .collect();
        let rule = RegulatoryRule::default();
        let sched = SchedulerConfig {
            policy: if wide {
                rfcharge::charging::ClusterPolicy::WideBeam
            } else {
                rfcharge::charging::ClusterPolicy::TimeDivided
            },
            ..Default::default()
        };
        let beams = schedule_beams(0, &polar, &AntennaMode::directional_3x3(), &rule, &sched);
        prop_assert!(ScheduleAudit::of(&beams, &rule).complies(&rule));
        prop_assert!(beams.len() <= rule.max_beams());
        let mut seen = HashSet::new();
        for b in &beams {
            prop_assert!(b.conducted_power <= b.power_limit * (1.0 + 1e-12));
            prop_assert!((0.0..TAU).contains(&b.boresight));
            let shares: f64 = b.members.iter().map(|m| m.share).sum();
            prop_assert!(b.members.is_empty() || (shares - 1.0).abs() < 1e-9);
            for id in b.members.iter().map(|m| m.user_id).chain(b.shadowed.iter().copied()) {
                prop_assert!(seen.insert(id), "user {} scheduled twice", id);
            }
        }
    }

    #[test]
    fn quantile_is_the_generalised_inverse(
        samples in prop::collection::vec(-1e3..1e3f64, 1..200), q in 0.0..=1.0f64,
    ) {
        let cdf = EmpiricalCdf::new(samples).unwrap();
        let x = cdf.quantile(q);
        prop_assert!(cdf.cdf(x) >= q - 1e-12);
        let below = cdf.samples().iter().filter(|v| **v < x).count() as f64 / cdf.len() as f64;
        prop_assert!(below < q || q == 0.0 || below == 0.0);
    }
}

#[test]
fn omni_has_no_beams() {
    let users = [UserPolar {
        user_id: 0,
        radial: 5.0,
        angle: PI,
    }];
    let beams = schedule_beams(
        0,
        &users,
        &AntennaMode::omni(),
        &RegulatoryRule::default(),
        &SchedulerConfig::default(),
    );
    assert!(beams.is_empty());
}
