use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ANDOT and outage statistics for one discharge rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMetrics {
    /// W
    pub discharge_rate: f64,
    pub andot_mean: f64,
    /// Sample standard deviation across replications (0 for one replication).
    pub andot_std: f64,
    pub andot_by_replication: Vec<f64>,
    /// Transitions into an empty battery, including devices starting empty.
    pub outage_events: u64,
    /// Device-seconds spent with an empty battery.
    pub outage_time_s: f64,
    pub mean_outage_duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegulatoryAudit {
    pub schedules_checked: u64,
    pub violations: u64,
    pub max_active_beams: usize,
    /// Largest observed total conducted power over the single-beam limit.
    pub max_aggregate_ratio: f64,
}

impl RegulatoryAudit {
    pub fn merge(&mut self, other: &RegulatoryAudit) {
        self.schedules_checked += other.schedules_checked;
        self.violations += other.violations;
        self.max_active_beams = self.max_active_beams.max(other.max_active_beams);
        self.max_aggregate_ratio = self.max_aggregate_ratio.max(other.max_aggregate_ratio);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub per_rate: Vec<RateMetrics>,
    /// Per user and replication: stored energy ÷ time spent receiving (J/s).
    /// Users that never received anything are left out.
    pub user_mean_rates: Vec<f64>,
    /// Thinned per-(user, step) stored power while receiving (J/s).
    pub raw_rate_samples: Vec<f64>,
    /// Fraction of user-steps with non-zero received power.
    pub receiving_fraction: f64,
    pub audit: RegulatoryAudit,
    pub replications: usize,
    pub steps_per_replication: usize,
}

impl SimMetrics {
    pub fn andot(&self, discharge_rate: f64) -> Option<f64> {
        self.rate(discharge_rate).map(|r| r.andot_mean)
    }

    pub fn rate(&self, discharge_rate: f64) -> Option<&RateMetrics> {
        self.per_rate
            .iter()
            .find(|r| (r.discharge_rate - discharge_rate).abs() <= 1e-12 * discharge_rate.abs())
    }
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        samples.retain(|v| !v.is_nan());
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples ≤ x.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    /// Smallest sample v with cdf(v) ≥ q; q is clamped to [0, 1].
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let q = q.clamp(0.0, 1.0);
        let rank = (q * n as f64).ceil() as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn iqr(&self) -> f64 {
        self.quantile(0.75) - self.quantile(0.25)
    }

    /// `value,cumulative_probability` rows, one per sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value", "cumulative_probability"])?;
        let n = self.sorted.len() as f64;
        for (i, v) in self.sorted.iter().enumerate() {
            w.write_record([v.to_string(), ((i + 1) as f64 / n).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// CDF of per-user mean collection rates.
pub fn energy_cdf(metrics: &SimMetrics) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(metrics.user_mean_rates.clone())
}

/// CDF of the thinned per-step samples.
pub fn raw_energy_cdf(metrics: &SimMetrics) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(metrics.raw_rate_samples.clone())
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_distribution_is_a_step() {
        let cdf = EmpiricalCdf::new(vec![2.5; 10]).unwrap();
        assert_eq!(cdf.quantile(0.5), 2.5);
        assert_eq!(cdf.cdf(2.4999), 0.0);
        assert_eq!(cdf.cdf(2.5), 1.0);
        assert_eq!(cdf.iqr(), 0.0);
    }

    #[test]
    fn quantiles_invert_the_cdf() {
        let cdf = EmpiricalCdf::new(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(cdf.quantile(0.0), 1.0);
        assert_eq!(cdf.quantile(0.25), 1.0);
        assert_eq!(cdf.quantile(0.26), 2.0);
        assert_eq!(cdf.quantile(1.0), 4.0);
        assert_eq!(cdf.cdf(2.0), 0.5);
        assert_eq!(cdf.cdf(0.0), 0.0);
        for q in [0.1, 0.3, 0.5, 0.9] {
            assert!(cdf.cdf(cdf.quantile(q)) >= q);
        }
    }

    #[test]
    fn empty_samples_error() {
        assert!(matches!(
            EmpiricalCdf::new(vec![]),
            Err(Error::EmptySamples)
        ));
        assert!(EmpiricalCdf::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        EmpiricalCdf::new(vec![2.0, 1.0])
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "value,cumulative_probability\n1,0.5\n2,1\n"
        );
    }

    #[test]
    fn mean_std_reference() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_735_805_6).abs() < 1e-12);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }
}
