//! Shared scalar semantics: frequency, linear power, angles, and the
//! dB/linear conversions used by every other module.
//!
//! All internal power arithmetic is carried out in linear units; decibels
//! appear only at I/O boundaries. This avoids sign and log mistakes in the
//! long multiplicative chains of the link equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, exact SI value (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A carrier frequency in hertz. Strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self> {
        if !hz.is_finite() || hz <= 0.0 {
            return Err(Error::Domain(format!(
                "frequency must be positive and finite, got {hz} Hz"
            )));
        }
        Ok(Frequency(hz))
    }

    pub fn from_ghz(ghz: f64) -> Result<Self> {
        Self::from_hz(ghz * 1e9)
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn ghz(self) -> f64 {
        self.0 / 1e9
    }

    /// Free-space wavelength `c / f` in meters.
    pub fn wavelength_m(self) -> f64 {
        SPEED_OF_LIGHT / self.0
    }
}

/// A nonnegative linear power quantity: either a dimensionless power ratio
/// (gain, transmittance) or a power in watts, depending on context.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerRatio(f64);

impl PowerRatio {
    pub fn from_linear(linear: f64) -> Result<Self> {
        if !linear.is_finite() || linear < 0.0 {
            return Err(Error::Domain(format!(
                "linear power must be nonnegative and finite, got {linear}"
            )));
        }
        Ok(PowerRatio(linear))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        db_to_linear(db)
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    /// `10 log10(linear)`. Zero maps to `-inf`.
    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// `10^(x/10)` with a finite-input check.
pub fn db_to_linear(db: f64) -> Result<PowerRatio> {
    if !db.is_finite() {
        return Err(Error::Domain(format!("dB value must be finite, got {db}")));
    }
    Ok(PowerRatio(10f64.powf(db / 10.0)))
}

/// `10 log10(x)` for a nonnegative linear value.
pub fn linear_to_db(linear: f64) -> Result<f64> {
    Ok(PowerRatio::from_linear(linear)?.db())
}

/// Convenience: dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> Result<f64> {
    Ok(db_to_linear(dbm)?.linear() / 1e3)
}

/// Convenience: watts to dBm. Zero maps to `-inf`.
pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * (watt * 1e3).log10()
}

/// A planar angle in radians.
///
/// Angles are stored as given; [`Angle::normalized`] folds into `(-pi, pi]`
/// and is what comparisons use.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn from_radians(rad: f64) -> Self {
        Angle(rad)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Fold into the principal interval `(-pi, pi]`.
    pub fn normalized(self) -> f64 {
        normalize_angle(self.0)
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }
}

/// Fold an angle in radians into `(-pi, pi]`. Exact identity on angles
/// already inside the principal interval.
pub fn normalize_angle(rad: f64) -> f64 {
    use std::f64::consts::PI;
    if rad > -PI && rad <= PI {
        return rad;
    }
    let r = rad.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}
