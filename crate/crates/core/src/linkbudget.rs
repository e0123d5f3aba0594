//! RF power-transfer arithmetic: unit conversions, Friis propagation, the
//! energy coverage radius, FCC-style conducted power limits and the
//! off-axis factor of a uniform linear array.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn dbm_to_watt(dbm: f64) -> Result<f64> {
    if !dbm.is_finite() {
        return Err(domain(format!("power level {dbm} dBm is not finite")));
    }
    Ok(10f64.powf(dbm / 10.0) / 1000.0)
}

pub fn watt_to_dbm(watt: f64) -> Result<f64> {
    if !watt.is_finite() || watt <= 0.0 {
        return Err(domain(format!(
            "power {watt} W must be finite and positive"
        )));
    }
    Ok(10.0 * (watt * 1000.0).log10())
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// A carrier frequency; the wavelength is always derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioBand {
    center_frequency_hz: f64,
}

impl RadioBand {
    pub fn new(center_frequency_hz: f64) -> Result<Self> {
        if !center_frequency_hz.is_finite() || center_frequency_hz <= 0.0 {
            return Err(domain(format!(
                "center frequency {center_frequency_hz} Hz must be positive"
            )));
        }
        Ok(Self {
            center_frequency_hz,
        })
    }

    pub fn mhz(mhz: f64) -> Result<Self> {
        Self::new(mhz * 1e6)
    }

    pub fn center_frequency_hz(&self) -> f64 {
        self.center_frequency_hz
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency_hz
    }
}

/// Short label used in tables and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Omni,
    Directional,
}

impl ModeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeKind::Omni => "omni",
            ModeKind::Directional => "directional",
        }
    }
}

impl std::fmt::Display for ModeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AntennaMode {
    Omni {
        gain_dbi: f64,
    },
    /// Square array with `elements_per_side`² elements steered as one beam.
    Directional {
        elements_per_side: usize,
        element_gain_dbi: f64,
        array_gain_dbi: f64,
        /// Angular width (rad) inside which two users share one beam.
        beam_width: f64,
    },
}

impl AntennaMode {
    /// Half-wave dipole, 2.15 dBi.
    pub fn omni() -> Self {
        AntennaMode::Omni { gain_dbi: 2.15 }
    }

    /// 3x3 half-wavelength array of dipoles, 14.51 dBi, 30° beam width.
    pub fn directional_3x3() -> Self {
        AntennaMode::Directional {
            elements_per_side: 3,
            element_gain_dbi: 2.15,
            array_gain_dbi: 14.51,
            beam_width: 30f64.to_radians(),
        }
    }

    pub fn kind(&self) -> ModeKind {
        match self {
            AntennaMode::Omni { .. } => ModeKind::Omni,
            AntennaMode::Directional { .. } => ModeKind::Directional,
        }
    }

    /// Total transmit gain in dBi.
    pub fn tx_gain_dbi(&self) -> f64 {
        match *self {
            AntennaMode::Omni { gain_dbi } => gain_dbi,
            AntennaMode::Directional { array_gain_dbi, .. } => array_gain_dbi,
        }
    }

    pub fn tx_gain_linear(&self) -> f64 {
        db_to_linear(self.tx_gain_dbi())
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AntennaMode::Omni { gain_dbi } => {
                if !gain_dbi.is_finite() {
                    return Err(domain("omni gain must be finite"));
                }
            }
            AntennaMode::Directional {
                elements_per_side,
                element_gain_dbi,
                array_gain_dbi,
                beam_width,
            } => {
                if elements_per_side == 0 {
                    return Err(domain("array needs at least one element per side"));
                }
                if !element_gain_dbi.is_finite() || !array_gain_dbi.is_finite() {
                    return Err(domain("array gains must be finite"));
                }
                if !(beam_width > 0.0 && beam_width < 2.0 * PI) {
                    return Err(domain(format!(
                        "beam width {beam_width} rad outside (0, 2π)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How conducted power is reduced once antenna gain exceeds the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionVariant {
    OneDbPerThreeDbi,
    OneDbPerOneDbi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepMode {
    /// Reduction rounded down to whole dB.
    FloorSteps,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatoryRule {
    pub base_limit_dbm: f64,
    pub gain_threshold_dbi: f64,
    pub reduction_variant: ReductionVariant,
    pub step_mode: StepMode,
    /// Aggregate of simultaneous beams may exceed one beam's limit by this much.
    pub aggregate_headroom_db: f64,
}

impl Default for RegulatoryRule {
    fn default() -> Self {
        Self {
            base_limit_dbm: 30.0,
            gain_threshold_dbi: 6.0,
            reduction_variant: ReductionVariant::OneDbPerThreeDbi,
            step_mode: StepMode::FloorSteps,
            aggregate_headroom_db: 8.0,
        }
    }
}

impl RegulatoryRule {
    /// Number of full-power beams that fit inside the aggregate headroom.
    pub fn max_beams(&self) -> usize {
        db_to_linear(self.aggregate_headroom_db).floor() as usize
    }

    /// Multiplier applied to the single-beam limit for the aggregate cap.
    pub fn aggregate_factor(&self) -> f64 {
        db_to_linear(self.aggregate_headroom_db)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.base_limit_dbm.is_finite() || self.base_limit_dbm < 0.0 {
            return Err(domain(
                "base limit must be a finite, non-negative dBm value",
            ));
        }
        if !self.aggregate_headroom_db.is_finite() || self.aggregate_headroom_db < 0.0 {
            return Err(domain("aggregate headroom must be finite and non-negative"));
        }
        if !self.gain_threshold_dbi.is_finite() {
            return Err(domain("gain threshold must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConfig {
    pub rx_gain_dbi: f64,
    /// Rectifier sensitivity, W.
    pub sensitivity: f64,
    /// RF-to-storage conversion efficiency.
    pub conversion_efficiency: f64,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            rx_gain_dbi: 0.0,
            sensitivity: 1e-5,
            conversion_efficiency: 0.5,
        }
    }
}

impl ReceiverConfig {
    pub fn rx_gain_linear(&self) -> f64 {
        db_to_linear(self.rx_gain_dbi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sensitivity > 0.0) {
            return Err(domain("sensitivity must be positive"));
        }
        if !(0.0..=1.0).contains(&self.conversion_efficiency) {
            return Err(domain("conversion efficiency must lie in [0, 1]"));
        }
        if !self.rx_gain_dbi.is_finite() {
            return Err(domain("receiver gain must be finite"));
        }
        Ok(())
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} = {value} must be finite and positive"
        )))
    }
}

/// Far-field Friis received power in W. All gains are linear.
pub fn received_power(
    p_tx: f64,
    g_tx: f64,
    g_rx: f64,
    wavelength: f64,
    distance: f64,
) -> Result<f64> {
    check_positive("transmit power", p_tx)?;
    check_positive("transmit gain", g_tx)?;
    check_positive("receive gain", g_rx)?;
    check_positive("wavelength", wavelength)?;
    check_positive("distance", distance)?;
    let spread = wavelength / (4.0 * PI * distance);
    Ok(p_tx * g_tx * g_rx * spread * spread)
}

/// Largest distance at which received power still meets `sensitivity`.
pub fn energy_radius(
    p_tx: f64,
    g_tx: f64,
    g_rx: f64,
    wavelength: f64,
    sensitivity: f64,
) -> Result<f64> {
    check_positive("transmit power", p_tx)?;
    check_positive("transmit gain", g_tx)?;
    check_positive("receive gain", g_rx)?;
    check_positive("wavelength", wavelength)?;
    check_positive("sensitivity", sensitivity)?;
    Ok((p_tx * g_tx * g_rx / sensitivity).sqrt() * wavelength / (4.0 * PI))
}

/// Conducted power allowed for an antenna of `gain_dbi`.
pub fn max_conducted_power(gain_dbi: f64, rule: &RegulatoryRule) -> f64 {
    let excess = gain_dbi - rule.gain_threshold_dbi;
    let reduction_db = if excess <= 0.0 {
        0.0
    } else {
        let raw = match rule.reduction_variant {
            ReductionVariant::OneDbPerThreeDbi => excess / 3.0,
            ReductionVariant::OneDbPerOneDbi => excess,
        };
        match rule.step_mode {
            StepMode::FloorSteps => raw.floor(),
            StepMode::Continuous => raw,
        }
    };
    db_to_linear(rule.base_limit_dbm - reduction_db) / 1000.0
}

/// Normalised power pattern |sin(Nφ/2) / (N sin(φ/2))|² of an N-element
/// uniform linear array, φ measured from boresight.
pub fn off_axis_factor(n_elements: usize, phi: f64) -> f64 {
    let n = n_elements.max(1) as f64;
    let half = 0.5 * phi;
    let denom = n * half.sin();
    if denom.abs() < 1e-12 {
        // φ → 0 (mod 2π): both numerator and denominator vanish.
        return 1.0;
    }
    let ratio = (n * half).sin() / denom;
    (ratio * ratio).min(1.0)
}

/// Apply the beam-count and aggregate-power caps to a set of per-beam
/// requests. Beams are the entries with a positive request, considered in
/// input order.
pub fn cap_aggregate_beams(
    requested_powers: &[f64],
    single_beam_limit: f64,
    rule: &RegulatoryRule,
) -> Vec<f64> {
    let max_beams = rule.max_beams();
    let mut active = 0usize;
    let mut out: Vec<f64> = requested_powers
        .iter()
        .map(|&req| {
            if req > 0.0 && active < max_beams {
                active += 1;
                req.min(single_beam_limit)
            } else {
                0.0
            }
        })
        .collect();
    let cap = single_beam_limit * rule.aggregate_factor();
    let total: f64 = out.iter().sum();
    if total > cap {
        let scale = cap / total;
        out.iter_mut().for_each(|p| *p *= scale);
    }
    out
}
