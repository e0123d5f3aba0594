//! Lévy-flight steps: truncated Pareto lengths with isotropic headings.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyStep {
    pub length: f64,
    pub heading: f64,
}

/// Pareto law P(L > x) = (x_min / x)^α restricted to `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPareto {
    pub alpha: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// (x_min / x_max)^α, the tail mass removed by truncation.
    cut: f64,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("Lévy tail index {alpha} outside (1, 2)")))
    }
}

fn truncated_mean(alpha: f64, x_min: f64, x_max: f64) -> f64 {
    let cut = (x_min / x_max).powf(alpha);
    alpha * x_min.powf(alpha) / (1.0 - cut) * (x_min.powf(1.0 - alpha) - x_max.powf(1.0 - alpha))
        / (alpha - 1.0)
}

impl TruncatedPareto {
    pub fn new(alpha: f64, x_min: f64, x_max: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(x_min > 0.0 && x_max > x_min) || !x_max.is_finite() {
            return Err(domain(format!("invalid Pareto support [{x_min}, {x_max}]")));
        }
        Ok(Self {
            alpha,
            x_min,
            x_max,
            cut: (x_min / x_max).powf(alpha),
        })
    }

    /// Choose `x_min` so the truncated law has the requested mean.
    pub fn with_mean(alpha: f64, mean: f64, x_max: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(mean > 0.0 && mean < x_max) {
            return Err(domain(format!(
                "mean step {mean} m must be positive and below the truncation {x_max} m"
            )));
        }
        // The truncated mean increases monotonically in x_min on (0, x_max).
        let (mut lo, mut hi) = (mean * 1e-9, mean);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if truncated_mean(alpha, mid, x_max) < mean {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Self::new(alpha, 0.5 * (lo + hi), x_max)
    }

    pub fn mean(&self) -> f64 {
        truncated_mean(self.alpha, self.x_min, self.x_max)
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let x = self.x_min * (1.0 - u * (1.0 - self.cut)).powf(-1.0 / self.alpha);
        x.min(self.x_max)
    }
}

/// `n` steps whose lengths have mean `scale` and are truncated at `max_length`.
pub fn levy_steps(
    alpha: f64,
    n: usize,
    scale: f64,
    max_length: f64,
    seed: u64,
) -> Result<Vec<LevyStep>> {
    let law = TruncatedPareto::with_mean(alpha, scale, max_length)?;
    let mut rng = seeds::rng(seed);
    Ok((0..n)
        .map(|_| LevyStep {
            length: law.sample(&mut rng),
            heading: rng.random::<f64>() * 2.0 * PI,
        })
        .collect())
}

/// Hill estimator of the tail index from the `k` largest samples.
pub fn hill_estimator(samples: &[f64], k: usize) -> Option<f64> {
    if k == 0 || k >= samples.len() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k];
    if !(threshold > 0.0) {
        return None;
    }
    let sum: f64 = sorted[..k].iter().map(|x| (x / threshold).ln()).sum();
    Some(k as f64 / sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_calibration_is_exact() {
        for (alpha, mean, cap) in [(1.5, 0.8333, 707.1), (1.2, 2.0, 100.0), (1.9, 0.1, 5.0)] {
            let law = TruncatedPareto::with_mean(alpha, mean, cap).unwrap();
            assert!((law.mean() - mean).abs() < 1e-9 * mean);
            assert!(law.x_min < mean);
        }
    }

    #[test]
    fn empirical_mean_and_support() {
        let steps = levy_steps(1.5, 200_000, 0.8333, 707.1, 1).unwrap();
        let mean = steps.iter().map(|s| s.length).sum::<f64>() / steps.len() as f64;
        assert!((mean / 0.8333 - 1.0).abs() < 0.02, "{mean}");
        assert!(steps
            .iter()
            .all(|s| s.length <= 707.1 && (0.0..2.0 * PI).contains(&s.heading)));
    }

    #[test]
    fn headings_are_isotropic() {
        let n = 100_000;
        let steps = levy_steps(1.5, n, 1.0, 500.0, 2).unwrap();
        let (c, s) = steps.iter().fold((0.0, 0.0), |(c, s), st| {
            (c + st.heading.cos(), s + st.heading.sin())
        });
        let resultant = c.hypot(s) / n as f64;
        assert!(resultant < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn hill_recovers_tail_index() {
        let steps = levy_steps(1.5, 100_000, 0.8333, 707.1, 3).unwrap();
        let lengths: Vec<f64> = steps.iter().map(|s| s.length).collect();
        let a = hill_estimator(&lengths, 2000).unwrap();
        assert!((1.35..=1.65).contains(&a), "{a}");
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(levy_steps(1.0, 10, 1.0, 10.0, 0).is_err());
        assert!(levy_steps(2.0, 10, 1.0, 10.0, 0).is_err());
        assert!(levy_steps(1.5, 10, 20.0, 10.0, 0).is_err());
        assert!(hill_estimator(&[1.0, 2.0], 2).is_none());
    }
}
