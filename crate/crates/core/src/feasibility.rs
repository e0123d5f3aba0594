//! Feasibility tables for RF charging: per band and antenna mode, how far
//! the rectifier can operate, what it harvests at a reference distance and
//! how long it must charge to fund a period of autonomous operation.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{config, domain, Result};
use crate::linkbudget::{
    energy_radius, max_conducted_power, received_power, AntennaMode, ModeKind, RadioBand,
    ReceiverConfig, RegulatoryRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionProfile {
    /// Device discharge rate, W.
    pub consumed_power: f64,
    /// Autonomous operating period the charge must fund, s.
    pub autonomy_target: f64,
}

impl Default for ConsumptionProfile {
    fn default() -> Self {
        Self {
            consumed_power: 5e-6,
            autonomy_target: 600.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportTime {
    Seconds(f64),
    NotAvailable,
}

impl SupportTime {
    pub fn seconds(&self) -> Option<f64> {
        match *self {
            SupportTime::Seconds(s) => Some(s),
            SupportTime::NotAvailable => None,
        }
    }

    pub fn minutes(&self) -> Option<f64> {
        self.seconds().map(|s| s / 60.0)
    }
}

impl Serialize for SupportTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            SupportTime::Seconds(v) => s.serialize_f64(v),
            SupportTime::NotAvailable => s.serialize_str("N/A"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityRow {
    pub band_hz: f64,
    pub mode: ModeKind,
    pub wavelength_m: f64,
    pub array_aperture_m: (f64, f64),
    pub energy_radius_m: f64,
    pub harvested_power_at_ref_w: f64,
    pub replenishment_rate_pct: f64,
    pub energy_positive_range_m: f64,
    pub support_time_s: SupportTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    pub rx: ReceiverConfig,
    pub rule: RegulatoryRule,
    pub profile: ConsumptionProfile,
    pub reference_distance: f64,
    /// Multiply harvested power by the receiver conversion efficiency.
    /// Off by default: the published table reports pre-conversion power.
    pub apply_conversion_efficiency: bool,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            rx: ReceiverConfig::default(),
            rule: RegulatoryRule::default(),
            profile: ConsumptionProfile::default(),
            reference_distance: 10.0,
            apply_conversion_efficiency: false,
        }
    }
}

/// ISM bands (915 MHz, 2.45 GHz, 5.8 GHz) followed by the cellular bands
/// (850 MHz, 1.7, 2.1, 1.9, 2.5 GHz).
pub fn default_band_plan() -> Vec<RadioBand> {
    [915.0, 2450.0, 5800.0, 850.0, 1700.0, 2100.0, 1900.0, 2500.0]
        .into_iter()
        .map(|mhz| RadioBand::mhz(mhz).expect("positive frequency"))
        .collect()
}

pub fn default_modes() -> Vec<AntennaMode> {
    vec![AntennaMode::omni(), AntennaMode::directional_3x3()]
}

/// Received (pre-conversion) power at `d_ref` when transmitting at the
/// regulatory limit for the mode's gain.
pub fn harvested_power_at(
    band: &RadioBand,
    mode: &AntennaMode,
    rx: &ReceiverConfig,
    rule: &RegulatoryRule,
    d_ref: f64,
) -> Result<f64> {
    let p_tx = max_conducted_power(mode.tx_gain_dbi(), rule);
    received_power(
        p_tx,
        mode.tx_gain_linear(),
        rx.rx_gain_linear(),
        band.wavelength(),
        d_ref,
    )
}

/// Percent surplus of harvesting over consumption.
pub fn replenishment_rate(harvested: f64, consumed: f64) -> f64 {
    (harvested / consumed - 1.0) * 100.0
}

/// Distance at which received power drops to `consumed`.
pub fn energy_positive_range(
    band: &RadioBand,
    mode: &AntennaMode,
    rx: &ReceiverConfig,
    rule: &RegulatoryRule,
    consumed: f64,
) -> Result<f64> {
    if !(consumed > 0.0) {
        return Err(domain("consumed power must be positive"));
    }
    let p_tx = max_conducted_power(mode.tx_gain_dbi(), rule);
    // Same closed form as the energy radius with the consumption as threshold.
    energy_radius(
        p_tx,
        mode.tx_gain_linear(),
        rx.rx_gain_linear(),
        band.wavelength(),
        consumed,
    )
}

/// Charging time whose net surplus (harvest minus concurrent consumption)
/// equals `consumed * autonomy_target`.
pub fn support_time(harvested: f64, consumed: f64, autonomy_target: f64) -> SupportTime {
    if harvested <= consumed {
        SupportTime::NotAvailable
    } else {
        SupportTime::Seconds(consumed * autonomy_target / (harvested - consumed))
    }
}

pub fn feasibility_row(
    band: &RadioBand,
    mode: &AntennaMode,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityRow> {
    mode.validate()?;
    let wavelength = band.wavelength();
    let p_tx = max_conducted_power(mode.tx_gain_dbi(), &opts.rule);
    let radius = energy_radius(
        p_tx,
        mode.tx_gain_linear(),
        opts.rx.rx_gain_linear(),
        wavelength,
        opts.rx.sensitivity,
    )?;
    let mut harvested =
        harvested_power_at(band, mode, &opts.rx, &opts.rule, opts.reference_distance)?;
    if opts.apply_conversion_efficiency {
        harvested *= opts.rx.conversion_efficiency;
    }
    let consumed = opts.profile.consumed_power;
    let positive_range = if harvested > 0.0 {
        opts.reference_distance * (harvested / consumed).sqrt()
    } else {
        0.0
    };
    Ok(FeasibilityRow {
        band_hz: band.center_frequency_hz(),
        mode: mode.kind(),
        wavelength_m: wavelength,
        array_aperture_m: (wavelength, wavelength),
        energy_radius_m: radius,
        harvested_power_at_ref_w: harvested,
        replenishment_rate_pct: replenishment_rate(harvested, consumed),
        energy_positive_range_m: positive_range,
        support_time_s: support_time(harvested, consumed, opts.profile.autonomy_target),
    })
}

/// One row per (band, mode), bands in the given order and modes nested.
pub fn feasibility_table(
    bands: &[RadioBand],
    modes: &[AntennaMode],
    opts: &FeasibilityOptions,
) -> Result<Vec<FeasibilityRow>> {
    if bands.is_empty() {
        return Err(config("band plan is empty"));
    }
    if !(opts.profile.consumed_power > 0.0 && opts.profile.autonomy_target > 0.0) {
        return Err(config("consumption profile values must be positive"));
    }
    if !(opts.reference_distance > 0.0) {
        return Err(config("reference distance must be positive"));
    }
    opts.rx.validate()?;
    opts.rule.validate()?;
    bands
        .iter()
        .flat_map(|b| modes.iter().map(move |m| feasibility_row(b, m, opts)))
        .collect()
}

pub const CSV_HEADER: [&str; 8] = [
    "band_hz",
    "mode",
    "wavelength_m",
    "energy_radius_m",
    "harvested_uW",
    "replenishment_pct",
    "positive_range_m",
    "support_time_min",
];

pub fn write_csv<W: Write>(rows: &[FeasibilityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let support = match r.support_time_s.minutes() {
            Some(m) => m.to_string(),
            None => "N/A".to_string(),
        };
        w.write_record([
            r.band_hz.to_string(),
            r.mode.to_string(),
            r.wavelength_m.to_string(),
            r.energy_radius_m.to_string(),
            (r.harvested_power_at_ref_w * 1e6).to_string(),
            r.replenishment_rate_pct.to_string(),
            r.energy_positive_range_m.to_string(),
            support,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a band plan from CSV. The frequency column may be named `band_hz`,
/// `center_frequency_hz` or `frequency_mhz`.
pub fn read_band_plan<R: Read>(input: R) -> Result<Vec<RadioBand>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let (col, scale) = headers
        .iter()
        .enumerate()
        .find_map(|(i, h)| match h {
            "band_hz" | "center_frequency_hz" => Some((i, 1.0)),
            "frequency_mhz" => Some((i, 1e6)),
            _ => None,
        })
        .ok_or_else(|| {
            config("band file needs a band_hz, center_frequency_hz or frequency_mhz column")
        })?;
    let mut bands = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let raw = rec.get(col).ok_or_else(|| {
            config(format!(
                "band file row {} is missing the frequency",
                line + 2
            ))
        })?;
        let f: f64 = raw.parse().map_err(|_| {
            config(format!(
                "band file row {}: `{raw}` is not a number",
                line + 2
            ))
        })?;
        bands.push(RadioBand::new(f * scale).map_err(|e| config(e.to_string()))?);
    }
    if bands.is_empty() {
        return Err(config("band file contains no bands"));
    }
    Ok(bands)
}

/// Printed reference values for the default band plan, used by
/// `feasibility --check-paper`.
pub mod reference {
    use super::*;

    #[derive(Debug, Clone, Copy)]
    pub struct ReferenceRow {
        pub band_mhz: f64,
        pub mode: ModeKind,
        pub energy_radius_m: f64,
        pub harvested_uw: f64,
        pub replenishment_pct: f64,
        pub positive_range_m: f64,
        /// `None` where the table prints N/A.
        pub support_time_min: Option<f64>,
    }

    const fn row(
        band_mhz: f64,
        mode: ModeKind,
        cells: [f64; 4],
        support_time_min: Option<f64>,
    ) -> ReferenceRow {
        ReferenceRow {
            band_mhz,
            mode,
            energy_radius_m: cells[0],
            harvested_uw: cells[1],
            replenishment_pct: cells[2],
            positive_range_m: cells[3],
            support_time_min,
        }
    }

    use ModeKind::{Directional as D, Omni as O};

    pub const ROWS: [ReferenceRow; 16] = [
        row(915.0, O, [10.57, 11.17, 123.0, 14.95], Some(8.11)),
        row(915.0, D, [34.85, 121.44, 2329.0, 49.28], Some(0.43)),
        row(2450.0, O, [3.95, 1.56, -69.0, 5.58], None),
        row(2450.0, D, [13.01, 16.94, 242.0, 18.41], Some(4.19)),
        row(5800.0, O, [1.67, 0.28, -94.0, 2.36], None),
        row(5800.0, D, [5.50, 3.02, -40.0, 7.77], None),
        row(850.0, O, [11.38, 12.94, 159.0, 16.09], Some(6.30)),
        row(850.0, D, [37.51, 140.73, 2715.0, 53.05], Some(0.37)),
        row(1700.0, O, [5.69, 3.24, -35.0, 8.04], None),
        row(1700.0, D, [18.76, 35.18, 604.0, 26.53], Some(1.66)),
        row(2100.0, O, [4.60, 2.12, -58.0, 6.51], None),
        row(2100.0, D, [15.18, 23.06, 361.0, 21.47], Some(2.77)),
        row(1900.0, O, [5.09, 2.59, -48.0, 7.20], None),
        row(1900.0, D, [16.78, 28.16, 463.0, 23.73], Some(2.16)),
        row(2500.0, O, [3.87, 1.50, -70.0, 5.47], None),
        row(2500.0, D, [12.75, 16.27, 225.0, 18.04], Some(4.44)),
    ];

    /// Printed precision (half a unit in the last place) per quantity.
    const HALF_ULP_TWO_DECIMALS: f64 = 0.005;
    const HALF_ULP_INTEGER: f64 = 0.5;

    #[derive(Debug, Clone, Serialize)]
    pub struct CellCheck {
        pub band_mhz: f64,
        pub mode: ModeKind,
        pub quantity: &'static str,
        pub computed: Option<f64>,
        pub reference: Option<f64>,
        pub relative_deviation: f64,
        pub tolerance: f64,
        pub pass: bool,
    }

    #[derive(Debug, Clone, Serialize)]
    pub struct ReferenceComparison {
        pub cells: Vec<CellCheck>,
        pub max_relative_deviation: f64,
        pub max_support_time_deviation: f64,
    }

    impl ReferenceComparison {
        pub fn all_pass(&self) -> bool {
            self.cells.iter().all(|c| c.pass)
        }

        pub fn failures(&self) -> impl Iterator<Item = &CellCheck> {
            self.cells.iter().filter(|c| !c.pass)
        }
    }

    /// A computed value matches a printed one if it lies within `tol`
    /// relative of it, or rounds to it at the printed precision.
    fn numeric_cell(
        r: &ReferenceRow,
        quantity: &'static str,
        computed: f64,
        reference: f64,
        tol: f64,
        half_ulp: f64,
    ) -> CellCheck {
        let relative_deviation = ((computed - reference) / reference).abs();
        let pass = relative_deviation <= tol || (computed - reference).abs() <= half_ulp;
        CellCheck {
            band_mhz: r.band_mhz,
            mode: r.mode,
            quantity,
            computed: Some(computed),
            reference: Some(reference),
            relative_deviation,
            tolerance: tol,
            pass,
        }
    }

    /// Compare the default-plan table against [`ROWS`] with `tol` relative
    /// tolerance on ordinary cells and `support_tol` on support times.
    pub fn compare(
        rows: &[FeasibilityRow],
        tol: f64,
        support_tol: f64,
    ) -> Result<ReferenceComparison> {
        let mut cells = Vec::new();
        for r in ROWS.iter() {
            let row = rows
                .iter()
                .find(|x| (x.band_hz - r.band_mhz * 1e6).abs() < 1.0 && x.mode == r.mode)
                .ok_or_else(|| {
                    config(format!("no computed row for {} MHz {}", r.band_mhz, r.mode))
                })?;
            cells.push(numeric_cell(
                r,
                "energy_radius_m",
                row.energy_radius_m,
                r.energy_radius_m,
                tol,
                HALF_ULP_TWO_DECIMALS,
            ));
            cells.push(numeric_cell(
                r,
                "harvested_uW",
                row.harvested_power_at_ref_w * 1e6,
                r.harvested_uw,
                tol,
                HALF_ULP_TWO_DECIMALS,
            ));
            cells.push(numeric_cell(
                r,
                "replenishment_pct",
                row.replenishment_rate_pct,
                r.replenishment_pct,
                tol,
                HALF_ULP_INTEGER,
            ));
            cells.push(numeric_cell(
                r,
                "positive_range_m",
                row.energy_positive_range_m,
                r.positive_range_m,
                tol,
                HALF_ULP_TWO_DECIMALS,
            ));
            let computed = row.support_time_s.minutes();
            cells.push(match (computed, r.support_time_min) {
                (Some(c), Some(p)) => numeric_cell(
                    r,
                    "support_time_min",
                    c,
                    p,
                    support_tol,
                    HALF_ULP_TWO_DECIMALS,
                ),
                (c, p) => CellCheck {
                    band_mhz: r.band_mhz,
                    mode: r.mode,
                    quantity: "support_time_min",
                    computed: c,
                    reference: p,
                    relative_deviation: if c.is_none() && p.is_none() {
                        0.0
                    } else {
                        f64::INFINITY
                    },
                    tolerance: 0.0,
                    pass: c.is_none() && p.is_none(),
                },
            });
        }
        let max_of = |support: bool| {
            cells
                .iter()
                .filter(|c| (c.quantity == "support_time_min") == support)
                .map(|c| c.relative_deviation)
                .fold(0.0, f64::max)
        };
        Ok(ReferenceComparison {
            max_relative_deviation: max_of(false),
            max_support_time_deviation: max_of(true),
            cells,
        })
    }
}
