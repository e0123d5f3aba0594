use serde::{Deserialize, Serialize};

use super::{run_batch, ScenarioConfig, SimMetrics};
use crate::error::{config, Result};
use crate::linkbudget::{AntennaMode, ModeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Number of SBSs in the area.
    SbsDensity,
    /// Mean user speed, m/s.
    UserSpeed,
    /// Number of users in the area.
    UserDensity,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::SbsDensity => "sbs",
            SweepAxis::UserSpeed => "speed",
            SweepAxis::UserDensity => "users",
        }
    }

    fn apply(&self, cfg: &mut ScenarioConfig, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
                Ok(v as usize)
            } else {
                Err(config(format!(
                    "{} sweep needs whole counts, got {v}",
                    self.name()
                )))
            }
        };
        match self {
            SweepAxis::SbsDensity => cfg.n_sbs = count(value)?,
            SweepAxis::UserDensity => cfg.n_users = count(value)?,
            SweepAxis::UserSpeed => cfg.mobility.mean_speed = value,
        }
        Ok(())
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sbs" | "sbs_density" => Ok(SweepAxis::SbsDensity),
            "speed" | "user_speed" => Ok(SweepAxis::UserSpeed),
            "users" | "user_density" => Ok(SweepAxis::UserDensity),
            other => Err(config(format!(
                "unknown sweep axis `{other}` (use sbs, speed or users)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub mode: ModeKind,
    pub metrics: SimMetrics,
}

/// Run `base` once per (mode, value). Every point reuses the base master
/// seed, so points differ only in the swept parameter. An empty `modes`
/// list sweeps the base antenna mode alone.
pub fn sweep(
    base: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    modes: &[AntennaMode],
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(config("sweep needs at least one value"));
    }
    let modes: Vec<AntennaMode> = if modes.is_empty() {
        vec![base.mode]
    } else {
        modes.to_vec()
    };
    let mut cfgs = Vec::with_capacity(values.len() * modes.len());
    let mut labels = Vec::with_capacity(cfgs.capacity());
    for mode in &modes {
        for &value in values {
            let mut cfg = base.clone();
            cfg.mode = *mode;
            axis.apply(&mut cfg, value)?;
            cfgs.push(cfg);
            labels.push((value, mode.kind()));
        }
    }
    let metrics = run_batch(&cfgs)?;
    Ok(labels
        .into_iter()
        .zip(metrics)
        .map(|((axis_value, mode), metrics)| SweepPoint {
            axis_value,
            mode,
            metrics,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simengine::DeploymentParams;

    #[test]
    fn cardinality_and_errors() {
        let base = ScenarioConfig {
            n_users: 5,
            duration: 200.0,
            replications: 1,
            deployment: DeploymentParams {
                burn_in_sweeps: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let pts = sweep(&base, SweepAxis::SbsDensity, &[5.0], &[]).unwrap();
        assert_eq!(pts.len(), 1);
        let pts = sweep(
            &base,
            SweepAxis::UserSpeed,
            &[0.5, 1.0],
            &[AntennaMode::omni(), AntennaMode::directional_3x3()],
        )
        .unwrap();
        assert_eq!(pts.len(), 4);
        assert!(sweep(&base, SweepAxis::SbsDensity, &[], &[]).is_err());
        assert!(sweep(&base, SweepAxis::UserDensity, &[2.5], &[]).is_err());
        assert!("nope".parse::<SweepAxis>().is_err());
        assert_eq!(
            "users".parse::<SweepAxis>().unwrap(),
            SweepAxis::UserDensity
        );
    }
}
