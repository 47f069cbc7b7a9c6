//! Hourly site-year data: ingestion from CSV, seeded synthesis, and
//! validation of the series that drive every simulation (irradiance,
//! temperature, wind speed, load demand, digester feedstock).
//!
//! A year is always 8760 hours; hour 0 is January 1, 00:00 local solar
//! time, and the day of the year for hour `t` is `1 + t/24`.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Weibull};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeding;
use crate::solar;

pub const HOURS_PER_YEAR: usize = 8760;

/// Unit labels with a fixed meaning for validation (values under every unit
/// except degrees Celsius must be non-negative).
pub const UNIT_WATTS: &str = "W";
pub const UNIT_WATTS_PER_M2: &str = "W/m2";
pub const UNIT_CELSIUS: &str = "degC";
pub const UNIT_M_PER_S: &str = "m/s";
pub const UNIT_KG: &str = "kg";

const SCENARIO_HEADER: &str = "hour,ghi_w_m2,diffuse_w_m2,temp_c,wind_ms,load_w,foodwaste_kg";

#[derive(Debug, Error)]
pub enum TimeseriesError {
    #[error("{path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: row count {found} != {HOURS_PER_YEAR}")]
    RowCount { path: String, found: usize },
    #[error("{path}: row {row}: cannot parse {column} value {value:?}")]
    BadCell {
        path: String,
        row: usize,
        column: String,
        value: String,
    },
    #[error("{path}: row {row}: expected {expected} columns, found {found}")]
    BadColumnCount {
        path: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}: header {found:?} does not match {expected:?}")]
    BadHeader {
        path: String,
        found: String,
        expected: String,
    },
    #[error("{path}: row {row}: hour column reads {found}, expected {expected}")]
    HourMismatch {
        path: String,
        row: usize,
        found: String,
        expected: usize,
    },
    #[error("series ({unit}): {reason}")]
    InvalidSeries { unit: String, reason: String },
    #[error("invalid synthesis parameters: {0}")]
    InvalidParams(String),
}

/// Per-site constants: solar geometry inputs, wind shear profile, and the
/// DC bus the battery strings must reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SiteConfig {
    pub latitude_deg: f64,
    pub ground_reflectance: f64,
    /// Height the wind-speed series is measured at.
    pub reference_height_m: f64,
    /// Exponent of the power-law vertical wind shear profile.
    pub power_law_alpha: f64,
    pub bus_voltage_v: f64,
}

impl Default for SiteConfig {
    fn default() -> Self {
        Self {
            latitude_deg: 24.0,
            ground_reflectance: 0.2,
            reference_height_m: 33.0,
            power_law_alpha: 0.15,
            bus_voltage_v: 24.0,
        }
    }
}

impl SiteConfig {
    /// Wind speed extrapolated from the reference measurement height to
    /// `height_m` with the power-law shear profile.
    pub fn wind_speed_at_height(&self, reference_speed_m_s: f64, height_m: f64) -> f64 {
        reference_speed_m_s * (height_m / self.reference_height_m).powf(self.power_law_alpha)
    }

    fn field_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            v.push(format!("latitude {} outside -90..=90", self.latitude_deg));
        }
        if !(0.0..=1.0).contains(&self.ground_reflectance) {
            v.push(format!(
                "ground reflectance {} outside 0..=1",
                self.ground_reflectance
            ));
        }
        if !(self.reference_height_m > 0.0) {
            v.push(format!(
                "reference height {} not positive",
                self.reference_height_m
            ));
        }
        if !(self.power_law_alpha > 0.0) {
            v.push(format!("shear exponent {} not positive", self.power_law_alpha));
        }
        if !(self.bus_voltage_v > 0.0) {
            v.push(format!("bus voltage {} not positive", self.bus_voltage_v));
        }
        v
    }
}

/// One year of hourly values with a unit label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlySeries {
    pub unit: String,
    pub values: Vec<f64>,
}

fn unit_allows_negative(unit: &str) -> bool {
    unit == UNIT_CELSIUS
}

impl HourlySeries {
    /// Build a validated series: exactly 8760 finite values, non-negative
    /// unless the unit is degrees Celsius.
    pub fn new(unit: &str, values: Vec<f64>) -> Result<Self, TimeseriesError> {
        if values.len() != HOURS_PER_YEAR {
            return Err(TimeseriesError::InvalidSeries {
                unit: unit.to_string(),
                reason: format!("length {} != {HOURS_PER_YEAR}", values.len()),
            });
        }
        for (t, &x) in values.iter().enumerate() {
            if !x.is_finite() {
                return Err(TimeseriesError::InvalidSeries {
                    unit: unit.to_string(),
                    reason: format!("non-finite value at hour {t}"),
                });
            }
            if x < 0.0 && !unit_allows_negative(unit) {
                return Err(TimeseriesError::InvalidSeries {
                    unit: unit.to_string(),
                    reason: format!("negative value {x} at hour {t}"),
                });
            }
        }
        Ok(Self {
            unit: unit.to_string(),
            values,
        })
    }
}

/// A full site-year: environment, load, and digester feedstock series plus
/// the site constants they are referenced to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioData {
    /// Global horizontal irradiance, W/m².
    pub ghi: HourlySeries,
    /// Diffuse horizontal irradiance, W/m².
    pub diffuse: HourlySeries,
    /// Ambient air temperature, °C.
    pub ambient_temp: HourlySeries,
    /// Wind speed at the site reference height, m/s.
    pub wind_speed_ref: HourlySeries,
    /// Electrical demand, W.
    pub load: HourlySeries,
    /// Digester feedstock, kg per hour.
    pub food_waste: HourlySeries,
    pub site: SiteConfig,
}

/// One broken rule found by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct RuleViolation {
    /// Which series (or "site") broke the rule.
    pub series: String,
    /// Offending hour, when the rule is per-hour.
    pub hour: Option<usize>,
    pub rule: String,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hour {
            Some(t) => write!(f, "{}[{t}]: {}", self.series, self.rule),
            None => write!(f, "{}: {}", self.series, self.rule),
        }
    }
}

/// Check every scenario invariant; empty result means the scenario is valid.
/// Each violation names the series, the hour where applicable, and the rule.
pub fn validate_scenario(s: &ScenarioData) -> Vec<RuleViolation> {
    let mut out = Vec::new();
    let series = [
        ("ghi", &s.ghi),
        ("diffuse", &s.diffuse),
        ("ambient_temp", &s.ambient_temp),
        ("wind_speed_ref", &s.wind_speed_ref),
        ("load", &s.load),
        ("food_waste", &s.food_waste),
    ];
    for (name, hs) in &series {
        if hs.values.len() != HOURS_PER_YEAR {
            out.push(RuleViolation {
                series: name.to_string(),
                hour: None,
                rule: format!("length {} != {HOURS_PER_YEAR}", hs.values.len()),
            });
            continue;
        }
        for (t, &x) in hs.values.iter().enumerate() {
            if !x.is_finite() {
                out.push(RuleViolation {
                    series: name.to_string(),
                    hour: Some(t),
                    rule: format!("non-finite value {x}"),
                });
            } else if x < 0.0 && !unit_allows_negative(&hs.unit) {
                out.push(RuleViolation {
                    series: name.to_string(),
                    hour: Some(t),
                    rule: format!("negative value {x} under unit {}", hs.unit),
                });
            }
        }
    }
    if s.ghi.values.len() == HOURS_PER_YEAR && s.diffuse.values.len() == HOURS_PER_YEAR {
        for t in 0..HOURS_PER_YEAR {
            if s.diffuse.values[t] > s.ghi.values[t] {
                out.push(RuleViolation {
                    series: "diffuse".to_string(),
                    hour: Some(t),
                    rule: format!(
                        "diffuse {} exceeds ghi {}",
                        s.diffuse.values[t], s.ghi.values[t]
                    ),
                });
            }
        }
    }
    for rule in s.site.field_violations() {
        out.push(RuleViolation {
            series: "site".to_string(),
            hour: None,
            rule,
        });
    }
    out
}

fn io_err(path: &Path, source: std::io::Error) -> TimeseriesError {
    TimeseriesError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Load one hourly series from a single-column CSV (one numeric value per
/// line, no header). Errors carry 1-based row numbers.
pub fn load_series_csv(path: &Path, expected_unit: &str) -> Result<HourlySeries, TimeseriesError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut values = Vec::with_capacity(HOURS_PER_YEAR);
    for (idx, line) in reader.lines().enumerate() {
        let row = idx + 1;
        let line = line.map_err(|e| io_err(path, e))?;
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        let x: f64 = cell.parse().map_err(|_| TimeseriesError::BadCell {
            path: path.display().to_string(),
            row,
            column: "value".to_string(),
            value: cell.to_string(),
        })?;
        if !x.is_finite() {
            return Err(TimeseriesError::BadCell {
                path: path.display().to_string(),
                row,
                column: "value".to_string(),
                value: cell.to_string(),
            });
        }
        if x < 0.0 && !unit_allows_negative(expected_unit) {
            return Err(TimeseriesError::BadCell {
                path: path.display().to_string(),
                row,
                column: "value".to_string(),
                value: format!("{cell} (negative under unit {expected_unit})"),
            });
        }
        values.push(x);
    }
    if values.len() != HOURS_PER_YEAR {
        return Err(TimeseriesError::RowCount {
            path: path.display().to_string(),
            found: values.len(),
        });
    }
    HourlySeries::new(expected_unit, values)
}

/// Write a scenario to the flat CSV interchange format: a fixed header row,
/// then 8760 rows of `hour,ghi_w_m2,diffuse_w_m2,temp_c,wind_ms,load_w,
/// foodwaste_kg`. Floats use the shortest round-trip representation, so a
/// write/load cycle is lossless.
pub fn write_scenario_csv(s: &ScenarioData, path: &Path) -> Result<(), TimeseriesError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "{SCENARIO_HEADER}")?;
        for t in 0..HOURS_PER_YEAR {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                t,
                s.ghi.values[t],
                s.diffuse.values[t],
                s.ambient_temp.values[t],
                s.wind_speed_ref.values[t],
                s.load.values[t],
                s.food_waste.values[t]
            )?;
        }
        w.flush()
    })()
    .map_err(|e| io_err(path, e))
}

/// Load a scenario from the flat CSV interchange format written by
/// [`write_scenario_csv`]. The site constants are not part of the file and
/// are supplied by the caller.
pub fn load_scenario_csv(path: &Path, site: SiteConfig) -> Result<ScenarioData, TimeseriesError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| TimeseriesError::BadHeader {
        path: path.display().to_string(),
        found: String::new(),
        expected: SCENARIO_HEADER.to_string(),
    })?;
    let header = header.map_err(|e| io_err(path, e))?;
    if header.trim() != SCENARIO_HEADER {
        return Err(TimeseriesError::BadHeader {
            path: path.display().to_string(),
            found: header,
            expected: SCENARIO_HEADER.to_string(),
        });
    }

    let columns = ["ghi_w_m2", "diffuse_w_m2", "temp_c", "wind_ms", "load_w", "foodwaste_kg"];
    let mut data: [Vec<f64>; 6] = Default::default();
    for v in &mut data {
        v.reserve(HOURS_PER_YEAR);
    }
    let mut n_rows = 0usize;
    for (idx, line) in lines {
        let row = idx + 1; // 1-based, header is row 1
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.trim().split(',').collect();
        if cells.len() != 7 {
            return Err(TimeseriesError::BadColumnCount {
                path: path.display().to_string(),
                row,
                expected: 7,
                found: cells.len(),
            });
        }
        let hour: usize = cells[0].parse().map_err(|_| TimeseriesError::BadCell {
            path: path.display().to_string(),
            row,
            column: "hour".to_string(),
            value: cells[0].to_string(),
        })?;
        if hour != n_rows {
            return Err(TimeseriesError::HourMismatch {
                path: path.display().to_string(),
                row,
                found: cells[0].to_string(),
                expected: n_rows,
            });
        }
        for (i, col) in columns.iter().enumerate() {
            let cell = cells[i + 1];
            let x: f64 = cell.parse().map_err(|_| TimeseriesError::BadCell {
                path: path.display().to_string(),
                row,
                column: col.to_string(),
                value: cell.to_string(),
            })?;
            if !x.is_finite() {
                return Err(TimeseriesError::BadCell {
                    path: path.display().to_string(),
                    row,
                    column: col.to_string(),
                    value: cell.to_string(),
                });
            }
            data[i].push(x);
        }
        n_rows += 1;
    }
    if n_rows != HOURS_PER_YEAR {
        return Err(TimeseriesError::RowCount {
            path: path.display().to_string(),
            found: n_rows,
        });
    }
    let [ghi, diffuse, temp, wind, load, waste] = data;
    Ok(ScenarioData {
        ghi: HourlySeries::new(UNIT_WATTS_PER_M2, ghi)?,
        diffuse: HourlySeries::new(UNIT_WATTS_PER_M2, diffuse)?,
        ambient_temp: HourlySeries::new(UNIT_CELSIUS, temp)?,
        wind_speed_ref: HourlySeries::new(UNIT_M_PER_S, wind)?,
        load: HourlySeries::new(UNIT_WATTS, load)?,
        food_waste: HourlySeries::new(UNIT_KG, waste)?,
        site,
    })
}

/// Hourly load synthesized from a 24-hour mean profile with Gaussian noise:
/// `max(0, N(profile[t mod 24], noise_fraction · profile[t mod 24]))`,
/// drawn from a seeded generator. Identical seed, identical series.
pub fn synth_load(
    daily_profile: &[f64],
    noise_fraction: f64,
    seed: u64,
) -> Result<HourlySeries, TimeseriesError> {
    if daily_profile.len() != 24 {
        return Err(TimeseriesError::InvalidParams(format!(
            "daily profile has {} entries, need 24",
            daily_profile.len()
        )));
    }
    if let Some(bad) = daily_profile.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(TimeseriesError::InvalidParams(format!(
            "daily profile entry {bad} is not a non-negative real"
        )));
    }
    if !noise_fraction.is_finite() || !(0.0..1.0).contains(&noise_fraction) {
        return Err(TimeseriesError::InvalidParams(format!(
            "noise fraction {noise_fraction} outside 0..1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(HOURS_PER_YEAR);
    for t in 0..HOURS_PER_YEAR {
        let mu = daily_profile[t % 24];
        let sigma = noise_fraction * mu;
        let draw = Normal::new(mu, sigma)
            .expect("mean and deviation are finite and non-negative")
            .sample(&mut rng);
        values.push(draw.max(0.0));
    }
    HourlySeries::new(UNIT_WATTS, values)
}

/// Knobs for [`synth_scenario`]; defaults describe a warm, moderately
/// windy site with an institutional daytime load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisParams {
    /// Clear-sky irradiance when the sun is at the zenith, W/m².
    pub clear_sky_peak_w_m2: f64,
    /// Lower bound of the per-day uniform clear-sky factor (1.0 = no
    /// cloud variation).
    pub cloud_floor: f64,
    pub weibull_shape: f64,
    pub weibull_scale_m_s: f64,
    pub temp_mean_c: f64,
    pub temp_annual_amplitude_c: f64,
    pub temp_diurnal_amplitude_c: f64,
    /// Day of year when the annual temperature sinusoid peaks.
    pub warmest_day: u32,
    /// Hour of day when the diurnal temperature sinusoid peaks.
    pub warmest_hour: f64,
    pub waste_kg_per_day: f64,
    /// Mean electrical demand for each hour of the day, W.
    pub load_daily_profile: Vec<f64>,
    pub load_noise_fraction: f64,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        Self {
            clear_sky_peak_w_m2: 1000.0,
            cloud_floor: 0.5,
            weibull_shape: 2.0,
            weibull_scale_m_s: 6.0,
            temp_mean_c: 25.0,
            temp_annual_amplitude_c: 5.0,
            temp_diurnal_amplitude_c: 4.0,
            warmest_day: 202,
            warmest_hour: 15.0,
            waste_kg_per_day: 400.0,
            load_daily_profile: vec![
                1500.0, 1400.0, 1350.0, 1300.0, 1300.0, 1400.0, 1800.0, 2600.0, 3800.0, 5000.0,
                5600.0, 6000.0, 6200.0, 6000.0, 5800.0, 5400.0, 4800.0, 4000.0, 3400.0, 3000.0,
                2600.0, 2200.0, 1900.0, 1650.0,
            ],
            load_noise_fraction: 0.08,
        }
    }
}

/// Synthesize a physically plausible seeded site-year: irradiance zero at
/// night and bell-shaped by day (scaled by a per-day cloud factor), diffuse
/// derived through the clearness-index correlation, Weibull wind, sinusoidal
/// temperature, uniform feedstock delivery, and the noisy daily load
/// profile. Pure function of `(site, params, seed)`.
pub fn synth_scenario(
    site: &SiteConfig,
    params: &SynthesisParams,
    seed: u64,
) -> Result<ScenarioData, TimeseriesError> {
    if !(params.weibull_scale_m_s > 0.0) || !(params.weibull_shape > 0.0) {
        return Err(TimeseriesError::InvalidParams(format!(
            "Weibull shape/scale must be positive, got {}/{}",
            params.weibull_shape, params.weibull_scale_m_s
        )));
    }
    if params.clear_sky_peak_w_m2 < 0.0 {
        return Err(TimeseriesError::InvalidParams(format!(
            "clear-sky peak irradiance {} is negative",
            params.clear_sky_peak_w_m2
        )));
    }
    if !(0.0..=1.0).contains(&params.cloud_floor) {
        return Err(TimeseriesError::InvalidParams(format!(
            "cloud floor {} outside 0..=1",
            params.cloud_floor
        )));
    }
    if params.waste_kg_per_day < 0.0 {
        return Err(TimeseriesError::InvalidParams(format!(
            "waste per day {} is negative",
            params.waste_kg_per_day
        )));
    }
    if !(1..=365).contains(&params.warmest_day) {
        return Err(TimeseriesError::InvalidParams(format!(
            "warmest day {} outside 1..=365",
            params.warmest_day
        )));
    }

    let mut sky_rng = ChaCha8Rng::seed_from_u64(seeding::derive_named(seed, "sky", 0));
    let mut wind_rng = ChaCha8Rng::seed_from_u64(seeding::derive_named(seed, "wind", 0));
    let weibull = Weibull::new(params.weibull_scale_m_s, params.weibull_shape)
        .expect("parameters checked positive above");

    let mut ghi = Vec::with_capacity(HOURS_PER_YEAR);
    let mut diffuse = Vec::with_capacity(HOURS_PER_YEAR);
    let mut temp = Vec::with_capacity(HOURS_PER_YEAR);
    let mut wind = Vec::with_capacity(HOURS_PER_YEAR);
    let mut waste = Vec::with_capacity(HOURS_PER_YEAR);

    let hourly_waste = params.waste_kg_per_day / 24.0;
    for day in 1..=365u32 {
        let clear_factor = sky_rng.gen_range(params.cloud_floor..=1.0);
        let decl =
            solar::declination(day).expect("day index is constructed within 1..=365");
        for hod in 0..24 {
            let solar_hour = hod as f64 + 0.5; // midpoint of the hour
            let omega = solar::hour_angle(solar_hour).expect("solar hour within 0..24");
            let cos_z = solar::cos_zenith(site.latitude_deg, decl, omega);
            let g = if cos_z > 0.0 {
                params.clear_sky_peak_w_m2 * clear_factor * cos_z
            } else {
                0.0
            };
            let kt = solar::clearness_index(g, day, cos_z)
                .expect("synthesized irradiance is finite and non-negative");
            let kd = solar::diffuse_fraction(kt).expect("clearness index is clamped to 0..=1");
            ghi.push(g);
            diffuse.push(kd * g);

            let t_hour = (day - 1) as f64 * 24.0 + hod as f64;
            let annual = (2.0 * std::f64::consts::PI * (t_hour / 24.0 - (params.warmest_day - 1) as f64)
                / 365.0)
                .cos();
            let diurnal =
                (2.0 * std::f64::consts::PI * (hod as f64 - params.warmest_hour) / 24.0).cos();
            temp.push(
                params.temp_mean_c
                    + params.temp_annual_amplitude_c * annual
                    + params.temp_diurnal_amplitude_c * diurnal,
            );

            wind.push(weibull.sample(&mut wind_rng));
            waste.push(hourly_waste);
        }
    }

    let load = synth_load(
        &params.load_daily_profile,
        params.load_noise_fraction,
        seeding::derive_named(seed, "load", 0),
    )?;

    Ok(ScenarioData {
        ghi: HourlySeries::new(UNIT_WATTS_PER_M2, ghi)?,
        diffuse: HourlySeries::new(UNIT_WATTS_PER_M2, diffuse)?,
        ambient_temp: HourlySeries::new(UNIT_CELSIUS, temp)?,
        wind_speed_ref: HourlySeries::new(UNIT_M_PER_S, wind)?,
        load,
        food_waste: HourlySeries::new(UNIT_KG, waste)?,
        site: site.clone(),
    })
}
