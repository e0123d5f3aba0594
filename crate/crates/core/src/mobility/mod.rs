//! User mobility: fractional Brownian motion (classical Brownian motion at
//! H = 0.5) and Lévy flight on the wrap-around area, calibrated so the mean
//! distance covered per time step matches a target speed.

pub mod fgn;
pub mod levy;

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::deployment::{Area, Point};
use crate::error::{domain, Result};
use crate::seeds;

pub use fgn::{fgn_increments, DaviesHarte, FgnMethod, FgnSample};
pub use levy::{hill_estimator, levy_steps, LevyStep, TruncatedPareto};

/// 3 km/h in m/s.
pub const WALKING_SPEED: f64 = 3.0 / 3.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MobilityModel {
    Fbm { hurst: f64 },
    Levy { alpha: f64 },
}

impl MobilityModel {
    pub fn label(&self) -> String {
        match self {
            MobilityModel::Fbm { hurst } => format!("fbm(H={hurst})"),
            MobilityModel::Levy { alpha } => format!("levy(alpha={alpha})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    pub model: MobilityModel,
    /// m/s
    pub mean_speed: f64,
    /// s
    pub time_step: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            // Persistent motion: pedestrians mostly keep their heading.
            model: MobilityModel::Fbm { hurst: 0.9 },
            mean_speed: WALKING_SPEED,
            time_step: 1.0,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<()> {
        match self.model {
            MobilityModel::Fbm { hurst } => fgn::check_hurst(hurst)?,
            MobilityModel::Levy { alpha } => levy::check_alpha(alpha)?,
        }
        if !(self.mean_speed > 0.0) || !self.mean_speed.is_finite() {
            return Err(domain("mean speed must be positive"));
        }
        if !(self.time_step > 0.0) || !self.time_step.is_finite() {
            return Err(domain("time step must be positive"));
        }
        Ok(())
    }

    /// Per-axis Gaussian step deviation whose 2-D (Rayleigh) mean length is
    /// `mean_speed * time_step`.
    pub fn fbm_axis_sigma(&self) -> f64 {
        self.mean_speed * self.time_step * (2.0 / PI).sqrt()
    }
}

/// Positions at a uniform time step, wrapped into the area.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time_step: f64,
    pub positions: Vec<Point>,
    /// Distance travelled before wrapping, m.
    pub path_length: f64,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.positions.len().saturating_sub(1)
    }

    pub fn duration(&self) -> f64 {
        self.steps() as f64 * self.time_step
    }

    pub fn mean_speed(&self) -> f64 {
        if self.steps() == 0 {
            0.0
        } else {
            self.path_length / self.duration()
        }
    }
}

enum Engine {
    Fbm(FbmEngine),
    Levy(TruncatedPareto),
}

enum FbmEngine {
    Circulant(DaviesHarte),
    Recursive { hurst: f64 },
}

/// Reusable trajectory source for one (config, duration, area): the
/// circulant embedding or step law is prepared once and each call to
/// [`TrajectoryGenerator::generate`] only draws fresh randomness.
pub struct TrajectoryGenerator {
    cfg: MobilityConfig,
    area: Area,
    steps: usize,
    engine: Engine,
}

impl TrajectoryGenerator {
    pub fn new(cfg: &MobilityConfig, duration: f64, area: &Area) -> Result<Self> {
        cfg.validate()?;
        area.validate()?;
        if !(duration >= cfg.time_step) {
            return Err(domain(format!(
                "duration {duration} s is shorter than one time step"
            )));
        }
        let steps = (duration / cfg.time_step).round() as usize;
        let engine = match cfg.model {
            MobilityModel::Fbm { hurst } => Engine::Fbm(match DaviesHarte::new(hurst, steps)? {
                Some(dh) => FbmEngine::Circulant(dh),
                None => FbmEngine::Recursive { hurst },
            }),
            MobilityModel::Levy { alpha } => Engine::Levy(TruncatedPareto::with_mean(
                alpha,
                cfg.mean_speed * cfg.time_step,
                area.diagonal(),
            )?),
        };
        Ok(Self {
            cfg: *cfg,
            area: *area,
            steps,
            engine,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn method(&self) -> Option<FgnMethod> {
        match &self.engine {
            Engine::Fbm(FbmEngine::Circulant(_)) => Some(FgnMethod::DaviesHarte),
            Engine::Fbm(FbmEngine::Recursive { .. }) => Some(FgnMethod::Hosking),
            Engine::Levy(_) => None,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Trajectory> {
        let mut rng = seeds::rng(seed);
        let start = self.area.uniform_point(&mut rng);
        let (dx, dy): (Vec<f64>, Vec<f64>) = match &self.engine {
            Engine::Fbm(engine) => {
                let sigma = self.cfg.fbm_axis_sigma();
                let (mut dx, mut dy) = match engine {
                    FbmEngine::Circulant(dh) => dh.sample_pair(&mut rng),
                    FbmEngine::Recursive { hurst } => (
                        fgn::hosking_increments(*hurst, self.steps, 1.0, &mut rng)?,
                        fgn::hosking_increments(*hurst, self.steps, 1.0, &mut rng)?,
                    ),
                };
                dx.iter_mut().for_each(|v| *v *= sigma);
                dy.iter_mut().for_each(|v| *v *= sigma);
                (dx, dy)
            }
            Engine::Levy(law) => (0..self.steps)
                .map(|_| {
                    let length = law.sample(&mut rng);
                    let heading = rng.random::<f64>() * 2.0 * PI;
                    (length * heading.cos(), length * heading.sin())
                })
                .unzip(),
        };

        let mut positions = Vec::with_capacity(self.steps + 1);
        let mut path_length = 0.0;
        let mut p = start;
        positions.push(p);
        for (x, y) in dx.into_iter().zip(dy) {
            path_length += (x * x + y * y).sqrt();
            p = self.area.wrap(Point::new(p.x + x, p.y + y));
            positions.push(p);
        }
        Ok(Trajectory {
            time_step: self.cfg.time_step,
            positions,
            path_length,
        })
    }
}

/// One trajectory starting uniformly in the area.
pub fn build_trajectory(
    cfg: &MobilityConfig,
    duration: f64,
    area: &Area,
    seed: u64,
) -> Result<Trajectory> {
    TrajectoryGenerator::new(cfg, duration, area)?.generate(seed)
}

/// Write `t_s,user_id,x_m,y_m` rows, keeping every `stride`-th position.
pub fn write_trajectories_csv<W: Write>(
    trajectories: &[Trajectory],
    stride: usize,
    out: W,
) -> Result<()> {
    let stride = stride.max(1);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_s", "user_id", "x_m", "y_m"])?;
    for (user, traj) in trajectories.iter().enumerate() {
        for (i, p) in traj.positions.iter().enumerate().step_by(stride) {
            w.write_record([
                (i as f64 * traj.time_step).to_string(),
                user.to_string(),
                p.x.to_string(),
                p.y.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
