//! Per-step energy delivery: directional beam scheduling under the
//! regulatory caps, received power per user and battery dynamics.
//!
//! Directional SBSs group users whose bearings are closer than the beam
//! width into one beam that is time-divided among them. Members that sit
//! behind a nearer member at (almost) the same bearing are shadowed. While
//! the beam dwells on one member, the others still collect the off-axis
//! fraction of its power.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::deployment::{torus_delta, Area, Point};
use crate::error::{domain, Result};
use crate::linkbudget::{
    cap_aggregate_beams, db_to_linear, linear_to_db, max_conducted_power, off_axis_factor,
    AntennaMode, RadioBand, ReceiverConfig, RegulatoryRule,
};

/// A user seen from one SBS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserPolar {
    pub user_id: usize,
    pub radial: f64,
    /// Bearing in [0, 2π).
    pub angle: f64,
}

impl UserPolar {
    /// Polar coordinates of `user` around `sbs` on the torus.
    pub fn locate(user_id: usize, sbs: Point, user: Point, area: &Area) -> Self {
        let (dx, dy) = torus_delta(sbs, user, area);
        Self {
            user_id,
            radial: dx.hypot(dy),
            angle: normalize_angle(dy.atan2(dx)),
        }
    }
}

#[inline]
pub fn normalize_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Absolute angular difference folded into [0, π].
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterPolicy {
    /// One full-gain beam per cluster, dwelling on each member in turn.
    TimeDivided,
    /// One widened, lower-gain beam covering the whole cluster at once.
    WideBeam,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    /// Bearing difference (rad) below which the farther user is blocked.
    pub shadow_epsilon: f64,
    pub policy: ClusterPolicy,
    /// Let users collect off-axis power from beams serving other clusters.
    pub cross_cluster_spillover: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            shadow_epsilon: 2f64.to_radians(),
            policy: ClusterPolicy::TimeDivided,
            cross_cluster_spillover: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamMember {
    pub user_id: usize,
    pub angle: f64,
    pub radial: f64,
    /// Fraction of the step the beam dwells on this member.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamAssignment {
    pub sbs_id: usize,
    /// Circular mean bearing of the members.
    pub boresight: f64,
    /// Unshadowed members; shares sum to 1.
    pub members: Vec<BeamMember>,
    /// Cluster members blocked by a nearer member.
    pub shadowed: Vec<usize>,
    pub conducted_power: f64,
    /// Regulatory conducted-power limit for this beam's gain.
    pub power_limit: f64,
    pub gain_dbi: f64,
    /// All members illuminated at once (wide beam) instead of in turn.
    pub simultaneous: bool,
}

impl BeamAssignment {
    pub fn serves(&self, user_id: usize) -> bool {
        self.members.iter().any(|m| m.user_id == user_id)
    }

    pub fn shadows(&self, user_id: usize) -> bool {
        self.shadowed.contains(&user_id)
    }
}

fn circular_mean(angles: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = angles.fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
    normalize_angle(s.atan2(c))
}

/// Single-linkage clustering of bearings on the circle. Sorts `users` by
/// bearing and rotates them so that every cluster is a contiguous range;
/// returns the range ends.
fn cluster_by_bearing(users: &mut [UserPolar], beam_width: f64) -> Vec<usize> {
    users.sort_by(|a, b| a.angle.total_cmp(&b.angle).then(a.user_id.cmp(&b.user_id)));
    let n = users.len();
    if n > 1 && users[0].angle + TAU - users[n - 1].angle < beam_width {
        // The cluster straddling the 0/2π seam must not be split: start
        // just after the first real gap instead.
        if let Some(i) = (1..n).find(|&i| users[i].angle - users[i - 1].angle >= beam_width) {
            users.rotate_left(i);
        }
    }
    let mut ends = Vec::new();
    for i in 1..n {
        if normalize_angle(users[i].angle - users[i - 1].angle) >= beam_width {
            ends.push(i);
        }
    }
    if n > 0 {
        ends.push(n);
    }
    ends
}

/// Gain of a beam widened to cover `span` radians of bearings.
fn widened_gain_dbi(mode_gain_dbi: f64, element_gain_dbi: f64, beam_width: f64, span: f64) -> f64 {
    let g = db_to_linear(mode_gain_dbi) * beam_width / (span + beam_width);
    linear_to_db(g).max(element_gain_dbi)
}

fn cluster_span(members: &[BeamMember]) -> f64 {
    if members.len() < 2 {
        return 0.0;
    }
    let mut angles: Vec<f64> = members.iter().map(|m| m.angle).collect();
    angles.sort_by(f64::total_cmp);
    let largest_gap = angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(angles[0] + TAU - angles[angles.len() - 1]))
        .fold(0.0, f64::max);
    TAU - largest_gap
}

/// Beam plan of one directional SBS for one step. Omni modes have no beams.
pub fn schedule_beams(
    sbs_id: usize,
    users_in_range: &[UserPolar],
    mode: &AntennaMode,
    rule: &RegulatoryRule,
    sched: &SchedulerConfig,
) -> Vec<BeamAssignment> {
    let AntennaMode::Directional {
        element_gain_dbi,
        array_gain_dbi,
        beam_width,
        ..
    } = *mode
    else {
        return Vec::new();
    };
    if users_in_range.is_empty() {
        return Vec::new();
    }

    let mut users = users_in_range.to_vec();
    let ends = cluster_by_bearing(&mut users, beam_width);

    struct Cluster {
        members: Vec<BeamMember>,
        shadowed: Vec<usize>,
        nearest: (f64, usize),
    }

    let mut clusters = Vec::with_capacity(ends.len());
    let mut start = 0;
    for end in ends {
        let group = &mut users[start..end];
        start = end;
        group.sort_by(|a, b| {
            a.radial
                .total_cmp(&b.radial)
                .then(a.user_id.cmp(&b.user_id))
        });
        let mut members = Vec::with_capacity(group.len());
        let mut shadowed = Vec::new();
        for (k, u) in group.iter().enumerate() {
            let blocked = group[..k]
                .iter()
                .any(|near| angular_distance(near.angle, u.angle) < sched.shadow_epsilon);
            if blocked {
                shadowed.push(u.user_id);
            } else {
                members.push(BeamMember {
                    user_id: u.user_id,
                    angle: u.angle,
                    radial: u.radial,
                    share: 0.0,
                });
            }
        }
        let share = 1.0 / members.len() as f64;
        members.iter_mut().for_each(|m| m.share = share);
        clusters.push(Cluster {
            nearest: (members[0].radial, members[0].user_id),
            members,
            shadowed,
        });
    }

    clusters.sort_by(|a, b| {
        a.nearest
            .0
            .total_cmp(&b.nearest.0)
            .then(a.nearest.1.cmp(&b.nearest.1))
    });
    clusters.truncate(rule.max_beams());

    let full_limit = max_conducted_power(array_gain_dbi, rule);
    let gains: Vec<f64> = clusters
        .iter()
        .map(|c| match sched.policy {
            ClusterPolicy::TimeDivided => array_gain_dbi,
            ClusterPolicy::WideBeam => widened_gain_dbi(
                array_gain_dbi,
                element_gain_dbi,
                beam_width,
                cluster_span(&c.members),
            ),
        })
        .collect();
    let limits: Vec<f64> = gains
        .iter()
        .map(|&g| {
            if g == array_gain_dbi {
                full_limit
            } else {
                max_conducted_power(g, rule)
            }
        })
        .collect();
    let reference_limit = limits.iter().copied().fold(0.0, f64::max);
    let powers = cap_aggregate_beams(&limits, reference_limit, rule);

    clusters
        .into_iter()
        .zip(gains)
        .zip(limits)
        .zip(powers)
        .map(
            |(((c, gain_dbi), power_limit), conducted_power)| BeamAssignment {
                sbs_id,
                boresight: circular_mean(c.members.iter().map(|u| u.angle)),
                members: c.members,
                shadowed: c.shadowed,
                conducted_power,
                power_limit,
                gain_dbi,
                simultaneous: sched.policy == ClusterPolicy::WideBeam,
            },
        )
        .collect()
}

/// Beam count and power audit of one SBS schedule.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScheduleAudit {
    pub active_beams: usize,
    pub total_power: f64,
    pub aggregate_cap: f64,
}

impl ScheduleAudit {
    pub fn of(beams: &[BeamAssignment], rule: &RegulatoryRule) -> Self {
        let single = beams.iter().map(|b| b.power_limit).fold(0.0, f64::max);
        Self {
            active_beams: beams.iter().filter(|b| b.conducted_power > 0.0).count(),
            total_power: beams.iter().map(|b| b.conducted_power).sum(),
            aggregate_cap: single * rule.aggregate_factor(),
        }
    }

    pub fn complies(&self, rule: &RegulatoryRule) -> bool {
        self.active_beams <= rule.max_beams() && self.total_power <= self.aggregate_cap + 1e-12
    }
}

/// Link constants shared by every SBS of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingModel {
    pub band: RadioBand,
    pub mode: AntennaMode,
    pub rx: ReceiverConfig,
    pub rule: RegulatoryRule,
    pub sched: SchedulerConfig,
    /// Links shorter than this are evaluated at this distance (far field).
    pub min_link_distance: f64,
    /// g_rx (λ / 4π)²
    spread: f64,
    /// Received power at 1 m for an omni SBS at its limit.
    omni_k: f64,
    /// Coverage radius at full single-beam (or omni) power.
    energy_radius: f64,
    n_elements: usize,
}

impl ChargingModel {
    pub fn new(
        band: RadioBand,
        mode: AntennaMode,
        rx: ReceiverConfig,
        rule: RegulatoryRule,
        sched: SchedulerConfig,
        min_link_distance: f64,
    ) -> Result<Self> {
        mode.validate()?;
        rx.validate()?;
        rule.validate()?;
        if !(min_link_distance > 0.0) {
            return Err(domain("minimum link distance must be positive"));
        }
        let lambda = band.wavelength();
        let spread = rx.rx_gain_linear() * (lambda / (4.0 * PI)).powi(2);
        let gain_dbi = mode.tx_gain_dbi();
        let k = max_conducted_power(gain_dbi, &rule) * db_to_linear(gain_dbi) * spread;
        let n_elements = match mode {
            AntennaMode::Directional {
                elements_per_side, ..
            } => elements_per_side,
            AntennaMode::Omni { .. } => 1,
        };
        Ok(Self {
            band,
            mode,
            rx,
            rule,
            sched,
            min_link_distance,
            spread,
            omni_k: k,
            energy_radius: (k / rx.sensitivity).sqrt(),
            n_elements,
        })
    }

    pub fn energy_radius(&self) -> f64 {
        self.energy_radius
    }

    pub fn is_directional(&self) -> bool {
        matches!(self.mode, AntennaMode::Directional { .. })
    }

    #[inline]
    fn gate(&self, p: f64) -> f64 {
        if p >= self.rx.sensitivity {
            p
        } else {
            0.0
        }
    }

    #[inline]
    fn inv_d2(&self, distance: f64) -> f64 {
        let d = distance.max(self.min_link_distance);
        1.0 / (d * d)
    }

    /// Broadcast power from one omni SBS, zero below sensitivity.
    #[inline]
    pub fn omni_link(&self, distance: f64) -> f64 {
        self.gate(self.omni_k * self.inv_d2(distance))
    }

    /// Mean power over one step that `user` collects from the beams of a
    /// single SBS.
    pub fn directional_link(&self, user: &UserPolar, beams: &[BeamAssignment]) -> f64 {
        if beams.iter().any(|b| b.shadows(user.user_id)) {
            return 0.0;
        }
        let inv_d2 = self.inv_d2(user.radial);
        let mut total = 0.0;
        for beam in beams {
            let member = beam.serves(user.user_id);
            if !member && !self.sched.cross_cluster_spillover {
                continue;
            }
            let full = beam.conducted_power * db_to_linear(beam.gain_dbi) * self.spread * inv_d2;
            if beam.simultaneous {
                let f = if member {
                    1.0
                } else {
                    off_axis_factor(
                        self.n_elements,
                        angular_distance(user.angle, beam.boresight),
                    )
                };
                total += self.gate(full * f);
            } else {
                for m in &beam.members {
                    let f = if m.user_id == user.user_id {
                        1.0
                    } else {
                        off_axis_factor(self.n_elements, angular_distance(user.angle, m.angle))
                    };
                    total += m.share * self.gate(full * f);
                }
            }
        }
        total
    }
}

/// Total received power of one user given every SBS position and, for
/// directional modes, every SBS schedule (indexed like `sbs_positions`).
pub fn instantaneous_rx_power(
    user_id: usize,
    user: Point,
    sbs_positions: &[Point],
    schedules: &[Vec<BeamAssignment>],
    model: &ChargingModel,
    area: &Area,
    one_beam_only: bool,
) -> f64 {
    let polar: Vec<UserPolar> = sbs_positions
        .iter()
        .map(|s| UserPolar::locate(user_id, *s, user, area))
        .collect();
    let nearest = polar
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.radial.total_cmp(&b.1.radial))
        .map(|(i, _)| i);
    polar
        .iter()
        .enumerate()
        .filter(|(i, _)| !one_beam_only || Some(*i) == nearest)
        .map(|(i, p)| {
            if model.is_directional() {
                schedules
                    .get(i)
                    .map_or(0.0, |beams| model.directional_link(p, beams))
            } else {
                model.omni_link(p.radial)
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WearableState {
    /// Stored energy, J.
    pub battery_level: f64,
    pub capacity: f64,
    /// W
    pub discharge_rate: f64,
    /// Level (J) at which a device starts asking for charge; it keeps asking
    /// until full. Zero or below means it always asks.
    pub charging_threshold: f64,
    pub requesting: bool,
}

impl WearableState {
    pub fn new(battery_level: f64, capacity: f64, discharge_rate: f64) -> Result<Self> {
        if !(capacity > 0.0) || !(discharge_rate > 0.0) {
            return Err(domain("capacity and discharge rate must be positive"));
        }
        if !(0.0..=capacity).contains(&battery_level) {
            return Err(domain(format!(
                "battery level {battery_level} J outside [0, {capacity}]"
            )));
        }
        Ok(Self {
            battery_level,
            capacity,
            discharge_rate,
            charging_threshold: 0.0,
            requesting: true,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.charging_threshold = threshold;
        self.requesting = threshold <= 0.0 || self.battery_level <= threshold;
        self
    }

    pub fn is_active(&self) -> bool {
        self.battery_level > 0.0
    }

    pub fn wants_charge(&self) -> bool {
        self.charging_threshold <= 0.0 || self.requesting
    }

    /// Advance by `dt` seconds while collecting `p_rx_total` watts.
    pub fn step(&self, p_rx_total: f64, efficiency: f64, dt: f64) -> BatteryTransition {
        let harvested = efficiency * p_rx_total * dt;
        let consumed = self.discharge_rate * dt;
        let unclamped = self.battery_level + harvested - consumed;
        let level = unclamped.clamp(0.0, self.capacity);
        let mut next = *self;
        next.battery_level = level;
        if self.charging_threshold > 0.0 {
            if level <= self.charging_threshold {
                next.requesting = true;
            } else if level >= self.capacity {
                next.requesting = false;
            }
        }
        BatteryTransition {
            state: next,
            was_active: self.is_active(),
            harvested,
            consumed,
            overflow: (unclamped - self.capacity).max(0.0),
            shortfall: (-unclamped).max(0.0),
        }
    }
}

/// Outcome of one battery step. Energy balance:
/// Δlevel = harvested − consumed − overflow + shortfall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryTransition {
    pub state: WearableState,
    /// Active during the step (level above zero at its start).
    pub was_active: bool,
    pub harvested: f64,
    pub consumed: f64,
    /// Energy rejected because the store was full.
    pub overflow: f64,
    /// Consumption that could not be met because the store ran empty.
    pub shortfall: f64,
}

pub fn battery_step(
    state: &WearableState,
    p_rx_total: f64,
    efficiency: f64,
    dt: f64,
) -> WearableState {
    state.step(p_rx_total, efficiency, dt).state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkbudget::received_power;

    fn polar(user_id: usize, radial: f64, deg: f64) -> UserPolar {
        UserPolar {
            user_id,
            radial,
            angle: normalize_angle(deg.to_radians()),
        }
    }

    fn model() -> ChargingModel {
        ChargingModel::new(
            RadioBand::mhz(915.0).unwrap(),
            AntennaMode::directional_3x3(),
            ReceiverConfig::default(),
            RegulatoryRule::default(),
            SchedulerConfig::default(),
            1.0,
        )
        .unwrap()
    }

    fn schedule(users: &[UserPolar]) -> Vec<BeamAssignment> {
        schedule_beams(
            0,
            users,
            &AntennaMode::directional_3x3(),
            &RegulatoryRule::default(),
            &SchedulerConfig::default(),
        )
    }

    #[test]
    fn angle_helpers() {
        assert!((angular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
        assert_eq!(angular_distance(1.0, 1.0), 0.0);
        assert!((angular_distance(0.0, PI) - PI).abs() < 1e-12);
        assert!(normalize_angle(-1e-20) < TAU);
    }

    #[test]
    fn aligned_users_shadow_the_farther_one() {
        let beams = schedule(&[polar(1, 8.0, 40.0), polar(0, 5.0, 40.0)]);
        assert_eq!(beams.len(), 1);
        assert_eq!(beams[0].members.len(), 1);
        assert_eq!(beams[0].members[0].user_id, 0);
        assert_eq!(beams[0].shadowed, vec![1]);
        let m = model();
        assert_eq!(m.directional_link(&polar(1, 8.0, 40.0), &beams), 0.0);
        assert!(m.directional_link(&polar(0, 5.0, 40.0), &beams) > 0.0);
    }

    #[test]
    fn seven_isolated_users_get_six_beams() {
        let users: Vec<UserPolar> = (0..7)
            .map(|i| polar(i, 5.0 + i as f64, i as f64 * 50.0))
            .collect();
        let beams = schedule(&users);
        assert_eq!(beams.len(), 6);
        assert!(beams.iter().all(|b| !b.serves(6)));
        let audit = ScheduleAudit::of(&beams, &RegulatoryRule::default());
        assert!(audit.complies(&RegulatoryRule::default()));
        assert_eq!(audit.active_beams, 6);
    }

    #[test]
    fn singleton_gets_full_power() {
        let beams = schedule(&[polar(3, 12.0, 100.0)]);
        assert_eq!(beams.len(), 1);
        assert_eq!(beams[0].members[0].share, 1.0);
        let limit = max_conducted_power(14.51, &RegulatoryRule::default());
        assert_eq!(beams[0].conducted_power, limit);
        assert!(schedule(&[]).is_empty());
    }

    #[test]
    fn clustering_wraps_around_zero() {
        let beams = schedule(&[
            polar(0, 5.0, 355.0),
            polar(1, 6.0, 10.0),
            polar(2, 7.0, 180.0),
        ]);
        assert_eq!(beams.len(), 2);
        let pair = beams.iter().find(|b| b.members.len() == 2).unwrap();
        assert!(pair.serves(0) && pair.serves(1));
        let shares: f64 = pair.members.iter().map(|m| m.share).sum();
        assert!((shares - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_user_at_boresight_matches_friis() {
        let m = model();
        let u = polar(0, 20.0, 0.0);
        let beams = schedule(&[u]);
        let expected = received_power(
            max_conducted_power(14.51, &RegulatoryRule::default()),
            db_to_linear(14.51),
            1.0,
            m.band.wavelength(),
            20.0,
        )
        .unwrap();
        assert!((m.directional_link(&u, &beams) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_member_cluster_time_slice_average() {
        // Brute force: walk the beam over both members and average.
        let m = model();
        let d = 10.0;
        let sep = 20.0;
        let users = [polar(0, d, 0.0), polar(1, d, sep)];
        let beams = schedule(&users);
        assert_eq!(beams.len(), 1);
        let p = received_power(
            max_conducted_power(14.51, &RegulatoryRule::default()),
            db_to_linear(14.51),
            1.0,
            m.band.wavelength(),
            d,
        )
        .unwrap();
        let slices = 1000;
        let mut acc = 0.0;
        for s in 0..slices {
            let steer = if s < slices / 2 {
                0.0
            } else {
                sep.to_radians()
            };
            acc += p * off_axis_factor(3, (steer - 0.0f64).abs());
        }
        let brute = acc / slices as f64;
        let closed = 0.5 * p * (1.0 + off_axis_factor(3, sep.to_radians()));
        assert!((brute - closed).abs() < 1e-12 * closed);
        for u in &users {
            assert!((m.directional_link(u, &beams) / closed - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_user_gets_nothing() {
        let area = Area::default();
        let sbs = [Point::new(100.0, 100.0)];
        let user = Point::new(300.0, 300.0);
        let omni = ChargingModel::new(
            RadioBand::mhz(915.0).unwrap(),
            AntennaMode::omni(),
            ReceiverConfig::default(),
            RegulatoryRule::default(),
            SchedulerConfig::default(),
            1.0,
        )
        .unwrap();
        assert_eq!(
            instantaneous_rx_power(0, user, &sbs, &[], &omni, &area, false),
            0.0
        );
        let m = model();
        let p = UserPolar::locate(0, sbs[0], user, &area);
        let beams = vec![schedule(&[p])];
        assert_eq!(
            instantaneous_rx_power(0, user, &sbs, &beams, &m, &area, false),
            0.0
        );
    }

    #[test]
    fn omni_sums_links_and_one_beam_keeps_nearest() {
        let area = Area::default();
        let omni = ChargingModel::new(
            RadioBand::mhz(915.0).unwrap(),
            AntennaMode::omni(),
            ReceiverConfig::default(),
            RegulatoryRule::default(),
            SchedulerConfig::default(),
            1.0,
        )
        .unwrap();
        let sbs = [Point::new(100.0, 100.0), Point::new(110.0, 100.0)];
        let user = Point::new(104.0, 100.0);
        let both = instantaneous_rx_power(0, user, &sbs, &[], &omni, &area, false);
        let one = instantaneous_rx_power(0, user, &sbs, &[], &omni, &area, true);
        assert!((both - (omni.omni_link(4.0) + omni.omni_link(6.0))).abs() < 1e-15);
        assert_eq!(one, omni.omni_link(4.0));
    }

    #[test]
    fn wide_beam_policy_trades_gain_for_power() {
        let sched = SchedulerConfig {
            policy: ClusterPolicy::WideBeam,
            ..Default::default()
        };
        let users = [polar(0, 10.0, 0.0), polar(1, 10.0, 25.0)];
        let beams = schedule_beams(
            0,
            &users,
            &AntennaMode::directional_3x3(),
            &RegulatoryRule::default(),
            &sched,
        );
        assert_eq!(beams.len(), 1);
        assert!(beams[0].simultaneous);
        assert!(beams[0].gain_dbi < 14.51);
        assert!(beams[0].conducted_power >= max_conducted_power(14.51, &RegulatoryRule::default()));
        assert!(ScheduleAudit::of(&beams, &RegulatoryRule::default())
            .complies(&RegulatoryRule::default()));
    }

    #[test]
    fn battery_examples() {
        let empty = WearableState::new(0.0, 1e-2, 5e-6).unwrap();
        assert_eq!(battery_step(&empty, 0.0, 0.5, 1.0).battery_level, 0.0);
        assert!(!empty.step(0.0, 0.5, 1.0).was_active);

        let full = WearableState::new(1e-2, 1e-2, 5e-6).unwrap();
        assert_eq!(battery_step(&full, 1e-5, 0.5, 1.0).battery_level, 1e-2);

        let s = WearableState::new(1e-3, 1e-2, 5e-6).unwrap();
        let next = battery_step(&s, 11.17e-6, 0.5, 1.0).battery_level;
        assert!((next - 1.000_585e-3).abs() < 1e-15, "{next}");
    }

    #[test]
    fn threshold_hysteresis() {
        let s = WearableState::new(8e-3, 1e-2, 1e-3)
            .unwrap()
            .with_threshold(5e-3);
        assert!(!s.wants_charge());
        let s = s.step(0.0, 0.5, 3.0).state;
        assert!(s.wants_charge());
        let s = s.step(1.0, 0.5, 1.0).state;
        assert_eq!(s.battery_level, 1e-2);
        assert!(!s.wants_charge());
    }

    #[test]
    fn battery_energy_balance() {
        let mut s = WearableState::new(2e-4, 1e-3, 5e-5).unwrap();
        let (mut harvested, mut consumed, mut overflow, mut shortfall) = (0.0, 0.0, 0.0, 0.0);
        let start = s.battery_level;
        for i in 0..500 {
            let p = if (i / 40) % 2 == 0 { 0.0 } else { 3e-4 };
            let t = s.step(p, 0.5, 1.0);
            harvested += t.harvested;
            consumed += t.consumed;
            overflow += t.overflow;
            shortfall += t.shortfall;
            s = t.state;
        }
        assert!(overflow > 0.0 && shortfall > 0.0);
        let delta = s.battery_level - start;
        assert!((delta - (harvested - consumed - overflow + shortfall)).abs() < 1e-15);
    }

    #[test]
    fn wearable_validation() {
        assert!(WearableState::new(2.0, 1.0, 1e-6).is_err());
        assert!(WearableState::new(0.5, 1.0, 0.0).is_err());
    }
}
