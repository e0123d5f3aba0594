//! Time-stepped Monte Carlo engine.
//!
//! Each replication places SBSs, draws one trajectory and one initial
//! charge per user, then advances all users one time step at a time:
//! schedule beams (or broadcast), accumulate received power across SBSs and
//! update every battery. All discharge rates share the same geometry and
//! randomness, so they are evaluated side by side within one replication.

mod metrics;
mod sweep;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charging::{
    schedule_beams, ChargingModel, ScheduleAudit, SchedulerConfig, UserPolar, WearableState,
};
use crate::deployment::{sample_strauss, torus_delta, Area, Point, StraussConfig};
use crate::error::{config, Result};
use crate::linkbudget::{AntennaMode, RadioBand, ReceiverConfig, RegulatoryRule};
use crate::mobility::{MobilityConfig, Trajectory, TrajectoryGenerator};
use crate::seeds::{self, purpose};

pub use metrics::{
    energy_cdf, raw_energy_cdf, EmpiricalCdf, RateMetrics, RegulatoryAudit, SimMetrics,
};
pub use sweep::{sweep, SweepAxis, SweepPoint};

/// Strauss parameters for SBS placement; the count lives in
/// [`ScenarioConfig::n_sbs`] and the seed is derived per replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentParams {
    pub interaction_radius: f64,
    pub interaction_gamma: f64,
    pub burn_in_sweeps: usize,
}

impl Default for DeploymentParams {
    fn default() -> Self {
        let s = StraussConfig::default();
        Self {
            interaction_radius: s.interaction_radius,
            interaction_gamma: s.interaction_gamma,
            burn_in_sweeps: s.burn_in_sweeps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub area: Area,
    pub n_sbs: usize,
    pub deployment: DeploymentParams,
    pub n_users: usize,
    pub mobility: MobilityConfig,
    pub band: RadioBand,
    pub mode: AntennaMode,
    pub rule: RegulatoryRule,
    pub rx: ReceiverConfig,
    pub scheduler: SchedulerConfig,
    /// W
    pub discharge_rates: Vec<f64>,
    /// J
    pub capacity: f64,
    /// J; zero means devices always accept charge.
    pub charging_threshold: f64,
    /// s
    pub duration: f64,
    pub replications: usize,
    /// Each user is served only by its nearest SBS.
    pub one_beam_only: bool,
    pub master_seed: u64,
    /// m
    pub min_link_distance: f64,
    /// Keep one raw collection sample every this many steps.
    pub raw_sample_stride: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area: Area::default(),
            n_sbs: 15,
            deployment: DeploymentParams::default(),
            n_users: 100,
            mobility: MobilityConfig::default(),
            band: RadioBand::mhz(915.0).expect("positive frequency"),
            mode: AntennaMode::directional_3x3(),
            rule: RegulatoryRule::default(),
            rx: ReceiverConfig::default(),
            scheduler: SchedulerConfig::default(),
            discharge_rates: vec![5e-6, 5e-5, 5e-4],
            capacity: 1e-2,
            charging_threshold: 0.0,
            duration: 1e5,
            replications: 10,
            one_beam_only: false,
            master_seed: 1,
            min_link_distance: 1.0,
            raw_sample_stride: 10,
        }
    }
}

impl ScenarioConfig {
    pub fn time_step(&self) -> f64 {
        self.mobility.time_step
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.time_step()).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.area.validate()?;
        self.mobility.validate()?;
        self.mode.validate()?;
        self.rule.validate()?;
        self.rx.validate()?;
        StraussConfig {
            n_points: self.n_sbs,
            interaction_radius: self.deployment.interaction_radius,
            interaction_gamma: self.deployment.interaction_gamma,
            burn_in_sweeps: self.deployment.burn_in_sweeps,
            seed: 0,
        }
        .validate()?;
        if self.discharge_rates.is_empty() || self.discharge_rates.iter().any(|r| !(*r > 0.0)) {
            return Err(config(
                "discharge rates must be a non-empty list of positive values",
            ));
        }
        if !(self.capacity > 0.0) || !self.capacity.is_finite() {
            return Err(config("battery capacity must be positive"));
        }
        if !(self.duration >= self.time_step()) || !self.duration.is_finite() {
            return Err(config("duration must be at least one time step"));
        }
        if self.replications == 0 {
            return Err(config("at least one replication is required"));
        }
        if !(self.min_link_distance > 0.0) {
            return Err(config("minimum link distance must be positive"));
        }
        if self.raw_sample_stride == 0 {
            return Err(config("raw sample stride must be at least 1"));
        }
        if !self.charging_threshold.is_finite() {
            return Err(config("charging threshold must be finite"));
        }
        Ok(())
    }

    pub fn charging_model(&self) -> Result<ChargingModel> {
        ChargingModel::new(
            self.band,
            self.mode,
            self.rx,
            self.rule,
            self.scheduler,
            self.min_link_distance,
        )
    }

    fn strauss(&self, replication: usize) -> StraussConfig {
        StraussConfig {
            n_points: self.n_sbs,
            interaction_radius: self.deployment.interaction_radius,
            interaction_gamma: self.deployment.interaction_gamma,
            burn_in_sweeps: self.deployment.burn_in_sweeps,
            seed: seeds::derive(self.master_seed, &[replication as u64, purpose::DEPLOYMENT]),
        }
    }

    fn trajectory_seed(&self, replication: usize, user: usize) -> u64 {
        seeds::derive(
            self.master_seed,
            &[replication as u64, purpose::TRAJECTORY, user as u64],
        )
    }
}

/// SBS positions and user trajectories of one replication, regenerated
/// from the same seed streams the engine uses.
pub fn replication_layout(
    cfg: &ScenarioConfig,
    replication: usize,
) -> Result<(Vec<Point>, Vec<Trajectory>)> {
    cfg.validate()?;
    let sbs = sample_strauss(&cfg.strauss(replication), &cfg.area)?;
    let gen = TrajectoryGenerator::new(&cfg.mobility, cfg.duration, &cfg.area)?;
    let trajectories = (0..cfg.n_users)
        .map(|u| gen.generate(cfg.trajectory_seed(replication, u)))
        .collect::<Result<Vec<_>>>()?;
    Ok((sbs, trajectories))
}

/// Latin-hypercube initial charges: each level is marginally uniform on
/// [0, capacity] and the population covers the range evenly.
fn initial_charges(cfg: &ScenarioConfig, replication: usize) -> Vec<f64> {
    let mut rng = seeds::rng(seeds::derive(
        cfg.master_seed,
        &[replication as u64, purpose::INITIAL_CHARGE],
    ));
    let n = cfg.n_users;
    let mut strata: Vec<usize> = (0..n).collect();
    strata.shuffle(&mut rng);
    strata
        .into_iter()
        .map(|k| cfg.capacity * (k as f64 + rng.random::<f64>()) / n as f64)
        .collect()
}

/// Positions of all users at every step, step-major, single precision.
struct PositionTable {
    n_users: usize,
    xs: Vec<f32>,
    ys: Vec<f32>,
}

impl PositionTable {
    #[inline]
    fn at(&self, step: usize, user: usize) -> Point {
        let i = step * self.n_users + user;
        Point::new(self.xs[i] as f64, self.ys[i] as f64)
    }
}

struct Scratch {
    in_range: Vec<Vec<UserPolar>>,
    candidates: Vec<usize>,
}

/// Bucket grid over the torus with cells at least one energy radius wide,
/// so every SBS in range of a user sits in the user's 3×3 neighbourhood.
struct SbsGrid {
    nx: usize,
    ny: usize,
    cell_w: f64,
    cell_h: f64,
    cells: Vec<Vec<usize>>,
}

impl SbsGrid {
    /// `None` when the area is too small for culling to help.
    fn new(sbs: &[Point], area: &Area, radius: f64) -> Option<Self> {
        let fit = |len: f64| (len / radius).floor();
        let (fx, fy) = (fit(area.width), fit(area.height));
        if !(fx >= 3.0 && fy >= 3.0) || fx * fy > 1e6 {
            return None;
        }
        let (nx, ny) = (fx as usize, fy as usize);
        let mut grid = Self {
            nx,
            ny,
            cell_w: area.width / nx as f64,
            cell_h: area.height / ny as f64,
            cells: vec![Vec::new(); nx * ny],
        };
        for (i, p) in sbs.iter().enumerate() {
            let (cx, cy) = grid.cell(*p);
            grid.cells[cy * nx + cx].push(i);
        }
        Some(grid)
    }

    fn cell(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x / self.cell_w) as usize).min(self.nx - 1);
        let cy = ((p.y / self.cell_h) as usize).min(self.ny - 1);
        (cx, cy)
    }

    /// SBS indices near `p`, ascending.
    fn near(&self, p: Point, out: &mut Vec<usize>) {
        out.clear();
        let (cx, cy) = self.cell(p);
        for dy in [self.ny - 1, 0, 1] {
            for dx in [self.nx - 1, 0, 1] {
                let x = (cx + dx) % self.nx;
                let y = (cy + dy) % self.ny;
                out.extend_from_slice(&self.cells[y * self.nx + x]);
            }
        }
        out.sort_unstable();
    }
}

struct StepContext<'a> {
    cfg: &'a ScenarioConfig,
    model: &'a ChargingModel,
    sbs: &'a [Point],
    grid: Option<SbsGrid>,
    radius2: f64,
}

impl StepContext<'_> {
    /// Received power of every user at one step. `mask` selects users that
    /// currently ask for charge.
    fn received_powers(
        &self,
        positions: &PositionTable,
        step: usize,
        mask: Option<&[bool]>,
        out: &mut [f64],
        scratch: &mut Scratch,
        audit: &mut RegulatoryAudit,
    ) {
        out.iter_mut().for_each(|p| *p = 0.0);
        if self.sbs.is_empty() {
            return;
        }
        let area = &self.cfg.area;
        let one_beam = self.cfg.one_beam_only;
        let directional = self.model.is_directional();
        if directional {
            scratch.in_range.iter_mut().for_each(Vec::clear);
        }
        for (u, power) in out.iter_mut().enumerate() {
            if mask.is_some_and(|m| !m[u]) {
                continue;
            }
            let pos = positions.at(step, u);
            let mut nearest = (f64::INFINITY, 0usize, 0.0, 0.0);
            scratch.candidates.clear();
            match &self.grid {
                Some(g) => g.near(pos, &mut scratch.candidates),
                None => scratch.candidates.extend(0..self.sbs.len()),
            }
            for &s in &scratch.candidates {
                let (dx, dy) = torus_delta(self.sbs[s], pos, area);
                let d2 = dx * dx + dy * dy;
                if one_beam {
                    if d2 < nearest.0 {
                        nearest = (d2, s, dx, dy);
                    }
                    continue;
                }
                if d2 <= self.radius2 {
                    if directional {
                        scratch.in_range[s].push(polar(u, dx, dy, d2));
                    } else {
                        *power += self.model.omni_link(d2.sqrt());
                    }
                }
            }
            if one_beam && nearest.0 <= self.radius2 {
                let (d2, s, dx, dy) = nearest;
                if directional {
                    scratch.in_range[s].push(polar(u, dx, dy, d2));
                } else {
                    *power += self.model.omni_link(d2.sqrt());
                }
            }
        }
        if !directional {
            return;
        }
        let rule = &self.cfg.rule;
        for (s, users) in scratch.in_range.iter().enumerate() {
            if users.is_empty() {
                continue;
            }
            let beams = schedule_beams(s, users, &self.cfg.mode, rule, &self.cfg.scheduler);
            let a = ScheduleAudit::of(&beams, rule);
            audit.schedules_checked += 1;
            audit.max_active_beams = audit.max_active_beams.max(a.active_beams);
            if a.aggregate_cap > 0.0 {
                let ratio = a.total_power / (a.aggregate_cap / rule.aggregate_factor());
                audit.max_aggregate_ratio = audit.max_aggregate_ratio.max(ratio);
            }
            if !a.complies(rule) {
                audit.violations += 1;
            }
            debug_assert!(a.complies(rule), "regulatory cap violated: {a:?}");
            for up in users {
                out[up.user_id] += self.model.directional_link(up, &beams);
            }
        }
    }
}

#[inline]
fn polar(user_id: usize, dx: f64, dy: f64, d2: f64) -> UserPolar {
    UserPolar {
        user_id,
        radial: d2.sqrt(),
        angle: crate::charging::normalize_angle(dy.atan2(dx)),
    }
}

struct LaneResult {
    andot: f64,
    outage_events: u64,
    outage_time: f64,
}

struct ReplicationResult {
    lanes: Vec<LaneResult>,
    user_mean_rates: Vec<f64>,
    raw_samples: Vec<f64>,
    receiving_steps: u64,
    audit: RegulatoryAudit,
}

fn build_positions(
    cfg: &ScenarioConfig,
    gen: &TrajectoryGenerator,
    replication: usize,
) -> Result<PositionTable> {
    let n_users = cfg.n_users;
    let steps = gen.steps();
    let mut positions = PositionTable {
        n_users,
        xs: vec![0.0; (steps + 1) * n_users],
        ys: vec![0.0; (steps + 1) * n_users],
    };
    for u in 0..n_users {
        let t = gen.generate(cfg.trajectory_seed(replication, u))?;
        for (step, p) in t.positions.iter().enumerate() {
            let i = step * n_users + u;
            positions.xs[i] = p.x as f32;
            positions.ys[i] = p.y as f32;
        }
    }
    Ok(positions)
}

fn run_replication(
    cfg: &ScenarioConfig,
    model: &ChargingModel,
    positions: &PositionTable,
    steps: usize,
    replication: usize,
) -> Result<ReplicationResult> {
    let n_users = cfg.n_users;
    let dt = cfg.time_step();
    let eta = cfg.rx.conversion_efficiency;

    let sbs = sample_strauss(&cfg.strauss(replication), &cfg.area)?;

    let charges = initial_charges(cfg, replication);
    let mut lanes: Vec<Vec<WearableState>> = cfg
        .discharge_rates
        .iter()
        .map(|&rate| {
            charges
                .iter()
                .map(|&level| {
                    WearableState::new(level, cfg.capacity, rate)
                        .map(|s| s.with_threshold(cfg.charging_threshold))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut active_steps = vec![0u64; lanes.len()];
    let mut outage_events: Vec<u64> = lanes
        .iter()
        .map(|l| l.iter().filter(|s| !s.is_active()).count() as u64)
        .collect();
    let mut outage_time = vec![0.0; lanes.len()];

    let radius = model.energy_radius();
    let ctx = StepContext {
        cfg,
        model,
        sbs: &sbs,
        grid: SbsGrid::new(&sbs, &cfg.area, radius),
        radius2: radius * radius,
    };
    let mut scratch = Scratch {
        in_range: vec![Vec::new(); sbs.len()],
        candidates: Vec::with_capacity(sbs.len()),
    };
    let mut audit = RegulatoryAudit::default();
    let shared = cfg.charging_threshold <= 0.0;
    let mut power = vec![0.0; n_users];
    let mut mask = vec![true; n_users];
    let mut user_energy = vec![0.0; n_users];
    let mut user_time = vec![0.0; n_users];
    let mut raw_samples = Vec::new();
    let mut receiving_steps = 0u64;

    for step in 1..=steps {
        if shared {
            ctx.received_powers(positions, step, None, &mut power, &mut scratch, &mut audit);
        }
        for (lane_idx, lane) in lanes.iter_mut().enumerate() {
            if !shared {
                for (m, s) in mask.iter_mut().zip(lane.iter()) {
                    *m = s.wants_charge();
                }
                ctx.received_powers(
                    positions,
                    step,
                    Some(&mask),
                    &mut power,
                    &mut scratch,
                    &mut audit,
                );
            }
            if lane_idx == 0 {
                for (u, &p) in power.iter().enumerate() {
                    if p > 0.0 {
                        receiving_steps += 1;
                        user_energy[u] += eta * p * dt;
                        user_time[u] += dt;
                        if step % cfg.raw_sample_stride == 0 {
                            raw_samples.push(eta * p);
                        }
                    }
                }
            }
            for (state, &p) in lane.iter_mut().zip(power.iter()) {
                let tr = state.step(p, eta, dt);
                if tr.was_active {
                    active_steps[lane_idx] += 1;
                    if !tr.state.is_active() {
                        outage_events[lane_idx] += 1;
                    }
                } else {
                    outage_time[lane_idx] += dt;
                }
                *state = tr.state;
            }
        }
    }

    let denom = (n_users * steps) as f64;
    let lanes = active_steps
        .iter()
        .zip(outage_events)
        .zip(outage_time)
        .map(|((&active, events), time)| LaneResult {
            andot: if denom > 0.0 {
                active as f64 / denom
            } else {
                0.0
            },
            outage_events: events,
            outage_time: time,
        })
        .collect();
    let user_mean_rates = user_energy
        .iter()
        .zip(&user_time)
        .filter(|(_, t)| **t > 0.0)
        .map(|(e, t)| e / t)
        .collect();
    Ok(ReplicationResult {
        lanes,
        user_mean_rates,
        raw_samples,
        receiving_steps,
        audit,
    })
}

/// Run every replication of `cfg` and aggregate the metrics. Replications
/// run in parallel; results are merged in replication order.
pub fn run_simulation(cfg: &ScenarioConfig) -> Result<SimMetrics> {
    let mut out = run_batch(std::slice::from_ref(cfg))?;
    Ok(out.pop().expect("one result per scenario"))
}

/// Settings that determine user trajectories; scenarios agreeing on them
/// see identical users and can share one position table per replication.
fn same_users(a: &ScenarioConfig, b: &ScenarioConfig) -> bool {
    a.mobility == b.mobility
        && a.duration == b.duration
        && a.area == b.area
        && a.n_users == b.n_users
        && a.master_seed == b.master_seed
        && a.replications == b.replications
}

/// Run several scenarios. Results equal those of [`run_simulation`] on each
/// scenario separately; scenarios that share user trajectories (e.g. points
/// of an SBS-density sweep) generate them only once per replication.
pub fn run_batch(cfgs: &[ScenarioConfig]) -> Result<Vec<SimMetrics>> {
    let models = cfgs
        .iter()
        .map(|c| {
            c.validate()?;
            c.charging_model()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..cfgs.len() {
        match groups
            .iter_mut()
            .find(|g| same_users(&cfgs[g[0]], &cfgs[i]))
        {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }

    let mut out: Vec<Option<SimMetrics>> = vec![None; cfgs.len()];
    for group in groups {
        let lead = &cfgs[group[0]];
        let gen = TrajectoryGenerator::new(&lead.mobility, lead.duration, &lead.area)?;
        let steps = gen.steps();
        let by_rep = (0..lead.replications)
            .into_par_iter()
            .map(|r| {
                let positions = build_positions(lead, &gen, r)?;
                group
                    .iter()
                    .map(|&i| run_replication(&cfgs[i], &models[i], &positions, steps, r))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, &i) in group.iter().enumerate() {
            let results: Vec<&ReplicationResult> = by_rep.iter().map(|rep| &rep[k]).collect();
            out[i] = Some(aggregate(&cfgs[i], steps, &results));
        }
    }
    Ok(out
        .into_iter()
        .map(|m| m.expect("every scenario runs"))
        .collect())
}

fn aggregate(cfg: &ScenarioConfig, steps: usize, results: &[&ReplicationResult]) -> SimMetrics {
    let per_rate = cfg
        .discharge_rates
        .iter()
        .enumerate()
        .map(|(i, &rate)| {
            let by_rep: Vec<f64> = results.iter().map(|r| r.lanes[i].andot).collect();
            let (andot_mean, andot_std) = metrics::mean_std(&by_rep);
            let outage_events: u64 = results.iter().map(|r| r.lanes[i].outage_events).sum();
            let outage_time_s: f64 = results.iter().map(|r| r.lanes[i].outage_time).sum();
            RateMetrics {
                discharge_rate: rate,
                andot_mean,
                andot_std,
                andot_by_replication: by_rep,
                outage_events,
                outage_time_s,
                mean_outage_duration_s: if outage_events > 0 {
                    outage_time_s / outage_events as f64
                } else {
                    0.0
                },
            }
        })
        .collect();

    let mut audit = RegulatoryAudit::default();
    let mut user_mean_rates = Vec::new();
    let mut raw_rate_samples = Vec::new();
    let mut receiving = 0u64;
    for r in results {
        audit.merge(&r.audit);
        user_mean_rates.extend_from_slice(&r.user_mean_rates);
        raw_rate_samples.extend_from_slice(&r.raw_samples);
        receiving += r.receiving_steps;
    }
    let user_steps = (cfg.n_users * steps * cfg.replications) as f64;
    SimMetrics {
        per_rate,
        user_mean_rates,
        raw_rate_samples,
        receiving_fraction: if user_steps > 0.0 {
            receiving as f64 / user_steps
        } else {
            0.0
        },
        audit,
        replications: cfg.replications,
        steps_per_replication: steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            n_users: 20,
            duration: 2000.0,
            replications: 2,
            deployment: DeploymentParams {
                burn_in_sweeps: 200,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn determinism() {
        let cfg = small();
        assert_eq!(run_simulation(&cfg).unwrap(), run_simulation(&cfg).unwrap());
    }

    #[test]
    fn andot_bounds_and_rate_ordering() {
        let m = run_simulation(&small()).unwrap();
        for r in &m.per_rate {
            assert!((0.0..=1.0).contains(&r.andot_mean));
        }
        assert!(m
            .per_rate
            .windows(2)
            .all(|w| w[0].andot_mean >= w[1].andot_mean));
        assert_eq!(m.audit.violations, 0);
        assert!(m.user_mean_rates.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn initial_charges_are_stratified() {
        let cfg = small();
        let mut c = initial_charges(&cfg, 0);
        c.sort_by(f64::total_cmp);
        for (k, v) in c.iter().enumerate() {
            let lo = cfg.capacity * k as f64 / cfg.n_users as f64;
            assert!(*v >= lo && *v < lo + cfg.capacity / cfg.n_users as f64);
        }
    }

    #[test]
    fn infinite_sensitivity_equals_no_sbs() {
        let mut gated = small();
        gated.rx.sensitivity = f64::INFINITY;
        let mut empty = small();
        empty.n_sbs = 0;
        let a = run_simulation(&gated).unwrap();
        let b = run_simulation(&empty).unwrap();
        assert_eq!(a.per_rate, b.per_rate);
        assert!(a.user_mean_rates.is_empty() && b.user_mean_rates.is_empty());
    }

    #[test]
    fn threshold_lanes_run_independently() {
        let mut cfg = small();
        cfg.charging_threshold = 0.5 * cfg.capacity;
        let m = run_simulation(&cfg).unwrap();
        assert_eq!(m.per_rate.len(), 3);
        assert_eq!(m.audit.violations, 0);
    }

    #[test]
    fn layout_matches_configuration() {
        let cfg = small();
        let (sbs, traj) = replication_layout(&cfg, 0).unwrap();
        assert_eq!(sbs.len(), cfg.n_sbs);
        assert_eq!(traj.len(), cfg.n_users);
        assert_eq!(traj[0].positions.len(), cfg.steps() + 1);
    }

    #[test]
    fn validation() {
        let mut cfg = small();
        cfg.discharge_rates.clear();
        assert!(run_simulation(&cfg).is_err());
        let mut cfg = small();
        cfg.duration = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn grid_culling_matches_full_scan() {
        for (mode, one_beam) in [
            (AntennaMode::omni(), false),
            (AntennaMode::directional_3x3(), false),
            (AntennaMode::directional_3x3(), true),
        ] {
            let cfg = ScenarioConfig {
                n_sbs: 40,
                mode,
                one_beam_only: one_beam,
                ..small()
            };
            let model = cfg.charging_model().unwrap();
            let gen = TrajectoryGenerator::new(&cfg.mobility, cfg.duration, &cfg.area).unwrap();
            let positions = build_positions(&cfg, &gen, 0).unwrap();
            let sbs = sample_strauss(&cfg.strauss(0), &cfg.area).unwrap();
            let radius = model.energy_radius();
            let ctx = |grid| StepContext {
                cfg: &cfg,
                model: &model,
                sbs: &sbs,
                grid,
                radius2: radius * radius,
            };
            let (fast, full) = (ctx(SbsGrid::new(&sbs, &cfg.area, radius)), ctx(None));
            assert!(fast.grid.is_some());
            let mut scratch = Scratch {
                in_range: vec![Vec::new(); sbs.len()],
                candidates: Vec::new(),
            };
            let mut audit = RegulatoryAudit::default();
            let (mut a, mut b) = (vec![0.0; cfg.n_users], vec![0.0; cfg.n_users]);
            let mut hits = 0;
            for step in 0..=gen.steps() {
                fast.received_powers(&positions, step, None, &mut a, &mut scratch, &mut audit);
                full.received_powers(&positions, step, None, &mut b, &mut scratch, &mut audit);
                assert_eq!(a, b, "step {step}");
                hits += a.iter().filter(|p| **p > 0.0).count();
            }
            assert!(hits > 0);
        }
    }
}
