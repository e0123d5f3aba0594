//! Fractional Gaussian noise.
//!
//! Exact sampling by circulant embedding (Davies-Harte). The Durbin-Levinson
//! (Hosking) recursion is kept as a fallback for embeddings that turn out
//! not to be positive semi-definite.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::seeds;

/// Autocovariance of unit-variance fGn at lag `k`:
/// ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H}).
pub fn autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FgnMethod {
    DaviesHarte,
    Hosking,
}

#[derive(Debug, Clone)]
pub struct FgnSample {
    pub values: Vec<f64>,
    pub method: FgnMethod,
}

pub(crate) fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("Hurst exponent {hurst} outside (0, 1)")))
    }
}

/// Circulant embedding of the fGn covariance for series of length `n`.
/// Build once, sample many times.
pub struct DaviesHarte {
    n: usize,
    /// sqrt(λ_k / 2m) for the 2m circulant eigenvalues.
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DaviesHarte {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DaviesHarte")
            .field("n", &self.n)
            .field("embedding", &self.weights.len())
            .finish()
    }
}

impl DaviesHarte {
    /// Returns `None` when the embedding has a materially negative eigenvalue.
    pub fn new(hurst: f64, n: usize) -> Result<Option<Self>> {
        check_hurst(hurst)?;
        if n == 0 {
            return Err(domain("fGn length must be at least 1"));
        }
        // rustfft handles any length, so no padding to a power of two.
        let m = n.max(2);
        let size = 2 * m;
        let mut row: Vec<Complex64> = (0..size)
            .map(|j| {
                let lag = if j <= m { j } else { size - j };
                Complex64::new(autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(size);
        fft.process(&mut row);

        let max_eig = row.iter().map(|c| c.re).fold(0.0, f64::max);
        let tol = 1e-10 * max_eig.max(1.0);
        if row.iter().any(|c| c.re < -tol) {
            return Ok(None);
        }
        let scale = 1.0 / size as f64;
        let weights = row.iter().map(|c| (c.re.max(0.0) * scale).sqrt()).collect();
        Ok(Some(Self { n, weights, fft }))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Two independent unit-variance fGn series from one transform: the
    /// real and imaginary parts of the embedded complex field.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let mut field: Vec<Complex64> = self
            .weights
            .iter()
            .map(|&w| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(w * re, w * im)
            })
            .collect();
        self.fft.process(&mut field);
        field.truncate(self.n);
        field.into_iter().map(|c| (c.re, c.im)).unzip()
    }
}

/// Durbin-Levinson recursion, O(n²). Exact for any valid covariance.
pub fn hosking_increments<R: Rng + ?Sized>(
    hurst: f64,
    n: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_hurst(hurst)?;
    let rho: Vec<f64> = (0..n).map(|k| autocovariance(hurst, k)).collect();
    let mut out = Vec::with_capacity(n);
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut prev: Vec<f64> = Vec::with_capacity(n);
    let mut var = 1.0;
    for t in 0..n {
        if t == 0 {
            let z: f64 = rng.sample(StandardNormal);
            out.push(z);
            continue;
        }
        let mut num = rho[t];
        for j in 1..t {
            num -= prev[j - 1] * rho[t - j];
        }
        let kappa = num / var;
        phi.clear();
        for j in 1..t {
            phi.push(prev[j - 1] - kappa * prev[t - j - 1]);
        }
        phi.push(kappa);
        var *= 1.0 - kappa * kappa;
        let mean: f64 = phi
            .iter()
            .enumerate()
            .map(|(j, p)| p * out[t - 1 - j])
            .sum();
        let z: f64 = rng.sample(StandardNormal);
        out.push(mean + var.max(0.0).sqrt() * z);
        std::mem::swap(&mut phi, &mut prev);
    }
    out.iter_mut().for_each(|v| *v *= sigma);
    Ok(out)
}

/// `n` fGn samples with standard deviation `sigma`.
pub fn fgn_increments(hurst: f64, n: usize, sigma: f64, seed: u64) -> Result<FgnSample> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(domain("fGn sigma must be finite and non-negative"));
    }
    let mut rng = seeds::rng(seed);
    match DaviesHarte::new(hurst, n)? {
        Some(dh) => {
            let (mut values, _) = dh.sample_pair(&mut rng);
            values.iter_mut().for_each(|v| *v *= sigma);
            Ok(FgnSample {
                values,
                method: FgnMethod::DaviesHarte,
            })
        }
        None => Ok(FgnSample {
            values: hosking_increments(hurst, n, sigma, &mut rng)?,
            method: FgnMethod::Hosking,
        }),
    }
}

/// Lag-k sample autocovariance about a known zero mean.
pub fn sample_autocovariance(x: &[f64], lag: usize) -> f64 {
    if lag >= x.len() {
        return 0.0;
    }
    let n = x.len() - lag;
    x[..n]
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / n as f64
}
