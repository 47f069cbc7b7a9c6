//! Solar position geometry and decomposition of horizontal irradiance onto a
//! fixed tilted plane.
//!
//! Angles are degrees throughout, irradiance W/m². The day of the year is
//! 1-based (1 = January 1) and leap days are not modelled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Solar constant, W/m².
pub const SOLAR_CONSTANT_W_M2: f64 = 1367.0;

/// Upper clamp applied to the beam ratio; near-horizon geometry otherwise
/// produces unphysical spikes as the denominator approaches zero.
pub const BEAM_RATIO_CAP: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum SolarError {
    #[error("day of year {0} outside 1..=365")]
    DayOutOfRange(u32),
    #[error("solar hour {0} outside 0..=24")]
    HourOutOfRange(f64),
    #[error("clearness index {0} outside 0..=1")]
    ClearnessOutOfRange(f64),
    #[error("invalid irradiance inputs: {0}")]
    InvalidIrradiance(String),
}

pub fn cos_deg(angle_deg: f64) -> f64 {
    angle_deg.to_radians().cos()
}

pub fn sin_deg(angle_deg: f64) -> f64 {
    angle_deg.to_radians().sin()
}

/// Sun declination for a day of the year, degrees. Bounded by ±23.45°.
pub fn declination(day_of_year: u32) -> Result<f64, SolarError> {
    if !(1..=365).contains(&day_of_year) {
        return Err(SolarError::DayOutOfRange(day_of_year));
    }
    Ok(23.45 * sin_deg(360.0 * (284.0 + day_of_year as f64) / 365.0))
}

/// Hour angle of the sun, degrees: 15° per hour, negative before solar noon.
pub fn hour_angle(solar_hour: f64) -> Result<f64, SolarError> {
    if !solar_hour.is_finite() || !(0.0..=24.0).contains(&solar_hour) {
        return Err(SolarError::HourOutOfRange(solar_hour));
    }
    Ok(15.0 * (solar_hour - 12.0))
}

/// Which plane orientation the beam-ratio numerator uses.
///
/// `PlusTilt` evaluates the tilted plane at (latitude + tilt) — the form this
/// toolkit's reference results were produced with. `Standard` is the textbook
/// equator-facing form (latitude − tilt).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TranspositionConvention {
    #[default]
    PlusTilt,
    Standard,
}

/// Angle set consumed by [`beam_ratio`]; all fields in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarAngles {
    pub declination_deg: f64,
    pub hour_angle_deg: f64,
    pub latitude_deg: f64,
    pub tilt_deg: f64,
}

/// Latitude/tilt trigonometry of the beam ratio, precomputed so that a year
/// simulation can evaluate the ratio hour by hour without repeating it.
#[derive(Debug, Clone, Copy)]
pub struct BeamRatioTerms {
    cos_plane: f64,
    sin_plane: f64,
    cos_lat: f64,
    sin_lat: f64,
}

impl BeamRatioTerms {
    pub fn new(latitude_deg: f64, tilt_deg: f64, convention: TranspositionConvention) -> Self {
        let plane = match convention {
            TranspositionConvention::PlusTilt => latitude_deg + tilt_deg,
            TranspositionConvention::Standard => latitude_deg - tilt_deg,
        };
        Self {
            cos_plane: cos_deg(plane),
            sin_plane: sin_deg(plane),
            cos_lat: cos_deg(latitude_deg),
            sin_lat: sin_deg(latitude_deg),
        }
    }

    /// Beam ratio from declination/hour-angle trig; `None` when the sun is at
    /// or below the horizon (the horizontal beam term is non-positive).
    pub fn eval(&self, cos_decl: f64, sin_decl: f64, cos_hour_angle: f64) -> Option<f64> {
        let horizontal = self.cos_lat * cos_decl * cos_hour_angle + self.sin_lat * sin_decl;
        if horizontal <= 0.0 {
            return None;
        }
        let tilted = self.cos_plane * cos_decl * cos_hour_angle + self.sin_plane * sin_decl;
        Some((tilted / horizontal).clamp(0.0, BEAM_RATIO_CAP))
    }
}

/// Ratio of beam irradiance on the tilted plane to beam on the horizontal,
/// clamped to [0, [`BEAM_RATIO_CAP`]]. `None` when the sun is below the
/// horizon; callers must treat the beam component as zero then.
pub fn beam_ratio(angles: &SolarAngles, convention: TranspositionConvention) -> Option<f64> {
    BeamRatioTerms::new(angles.latitude_deg, angles.tilt_deg, convention).eval(
        cos_deg(angles.declination_deg),
        sin_deg(angles.declination_deg),
        cos_deg(angles.hour_angle_deg),
    )
}

/// Diffuse fraction of global horizontal irradiance as a piecewise polynomial
/// of the hourly clearness index. Output clamped into [0, 1].
pub fn diffuse_fraction(clearness_index: f64) -> Result<f64, SolarError> {
    if !clearness_index.is_finite() || !(0.0..=1.0).contains(&clearness_index) {
        return Err(SolarError::ClearnessOutOfRange(clearness_index));
    }
    let k = clearness_index;
    let f = if k <= 0.22 {
        1.0 - 0.09 * k
    } else if k <= 0.80 {
        0.9511 - 0.1604 * k + 4.388 * k.powi(2) - 16.638 * k.powi(3) + 12.336 * k.powi(4)
    } else {
        0.165
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Sky and ground view factors of a plane tilted `tilt_deg` from horizontal.
pub fn tilt_view_factors(tilt_deg: f64) -> (f64, f64) {
    let c = cos_deg(tilt_deg);
    ((1.0 + c) / 2.0, (1.0 - c) / 2.0)
}

/// Transposition arithmetic shared with the year simulator, which precomputes
/// the view factors once per design instead of per hour.
pub fn tilted_irradiance_terms(
    ghi: f64,
    diffuse: f64,
    beam_ratio: f64,
    sky_view: f64,
    ground_view: f64,
    ground_reflectance: f64,
) -> f64 {
    (ghi - diffuse) * beam_ratio + diffuse * sky_view + ghi * ground_reflectance * ground_view
}

/// Plane-of-array irradiance from global and diffuse horizontal components:
/// beam scaled by `beam_ratio`, isotropic sky diffuse, and ground reflection.
pub fn tilted_irradiance(
    ghi: f64,
    diffuse: f64,
    beam_ratio: f64,
    tilt_deg: f64,
    ground_reflectance: f64,
) -> Result<f64, SolarError> {
    if !(ghi.is_finite() && diffuse.is_finite()) || ghi < 0.0 || diffuse < 0.0 || diffuse > ghi {
        return Err(SolarError::InvalidIrradiance(format!(
            "need 0 <= diffuse <= ghi, got ghi={ghi} diffuse={diffuse}"
        )));
    }
    if beam_ratio < 0.0 || !beam_ratio.is_finite() {
        return Err(SolarError::InvalidIrradiance(format!(
            "beam ratio {beam_ratio} must be finite and non-negative"
        )));
    }
    if !(0.0..=1.0).contains(&ground_reflectance) {
        return Err(SolarError::InvalidIrradiance(format!(
            "ground reflectance {ground_reflectance} outside 0..=1"
        )));
    }
    let (sky, ground) = tilt_view_factors(tilt_deg);
    Ok(tilted_irradiance_terms(
        ghi,
        diffuse,
        beam_ratio,
        sky,
        ground,
        ground_reflectance,
    ))
}

/// Extraterrestrial normal irradiance for a day of the year, W/m², with the
/// annual orbital eccentricity correction.
pub fn extraterrestrial_normal(day_of_year: u32) -> Result<f64, SolarError> {
    if !(1..=365).contains(&day_of_year) {
        return Err(SolarError::DayOutOfRange(day_of_year));
    }
    Ok(SOLAR_CONSTANT_W_M2 * (1.0 + 0.033 * cos_deg(360.0 * day_of_year as f64 / 365.0)))
}

/// Cosine of the solar zenith angle; values ≤ 0 mean the sun is below the
/// horizon.
pub fn cos_zenith(latitude_deg: f64, declination_deg: f64, hour_angle_deg: f64) -> f64 {
    cos_deg(latitude_deg) * cos_deg(declination_deg) * cos_deg(hour_angle_deg)
        + sin_deg(latitude_deg) * sin_deg(declination_deg)
}

/// Hourly clearness index: measured GHI over extraterrestrial horizontal
/// irradiance, clamped into [0, 1]. Zero when the sun is below the horizon.
pub fn clearness_index(
    ghi_w_m2: f64,
    day_of_year: u32,
    cos_zenith: f64,
) -> Result<f64, SolarError> {
    if ghi_w_m2 < 0.0 || !ghi_w_m2.is_finite() {
        return Err(SolarError::InvalidIrradiance(format!(
            "ghi {ghi_w_m2} must be finite and non-negative"
        )));
    }
    if cos_zenith <= 0.0 || ghi_w_m2 == 0.0 {
        return Ok(0.0);
    }
    let horizontal_extraterrestrial = extraterrestrial_normal(day_of_year)? * cos_zenith;
    Ok((ghi_w_m2 / horizontal_extraterrestrial).clamp(0.0, 1.0))
}
