//! Frequency-dependent environmental losses: molecular-absorption
//! transmittance (Beer-Lambert), rain attenuation, foliage loss, and the
//! measured indoor penetration losses.
//!
//! All tables are in the units practitioners quote (GHz, dB/km, mm/hr);
//! conversion to nepers happens only inside [`transmittance`]. Queries
//! outside a table's span are an error, never an extrapolation: specific
//! attenuation is violently non-monotone in frequency, so guessing between
//! or beyond absorption lines would be meaningless.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quantity::{Frequency, PowerRatio};

/// dB per neper: `10 log10(e)`.
const DB_PER_NEPER: f64 = 10.0 / std::f64::consts::LN_10;

/// Frequency-indexed specific-attenuation table (dB/km), log-log
/// interpolated between anchors.
#[derive(Debug, Clone)]
pub struct AbsorptionSpectrum {
    /// `(frequency Hz, specific attenuation dB/km)`, strictly increasing in
    /// frequency.
    anchors: Vec<(f64, f64)>,
}

/// The shipped default tables, embedded verbatim.
pub const BUILTIN_TABLES_TOML: &str = include_str!("../data/propagation_tables.toml");

impl AbsorptionSpectrum {
    /// Build from `(GHz, dB/km)` anchors.
    pub fn from_anchors_ghz(anchors_ghz: &[(f64, f64)]) -> Result<Self> {
        if anchors_ghz.len() < 2 {
            return Err(Error::Config(
                "absorption spectrum needs at least two anchors".into(),
            ));
        }
        let mut anchors = Vec::with_capacity(anchors_ghz.len());
        for &(ghz, att) in anchors_ghz {
            if !(ghz.is_finite() && att.is_finite()) || ghz <= 0.0 || att < 0.0 {
                return Err(Error::Config(format!(
                    "absorption anchor ({ghz} GHz, {att} dB/km) is invalid"
                )));
            }
            anchors.push((ghz * 1e9, att));
        }
        if !anchors.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::Config(
                "absorption anchors must be strictly increasing in frequency".into(),
            ));
        }
        Ok(AbsorptionSpectrum { anchors })
    }

    /// The sparse default spectrum built from the quoted O2/H2O line peaks.
    pub fn builtin() -> Self {
        TableSet::builtin()
            .absorption
            .expect("builtin table file carries an absorption spectrum")
    }

    /// Covered frequency range in Hz.
    pub fn range_hz(&self) -> (f64, f64) {
        (self.anchors[0].0, self.anchors[self.anchors.len() - 1].0)
    }

    /// Specific attenuation in dB/km at `f`.
    ///
    /// Anchor frequencies are returned exactly; between anchors the value is
    /// interpolated linearly in log-attenuation over log-frequency (falling
    /// back to linear where an anchor attenuation is zero). Outside the
    /// anchor span this is an extrapolation error.
    pub fn specific_attenuation_db_per_km(&self, f: Frequency) -> Result<f64> {
        let hz = f.hz();
        let (lo, hi) = self.range_hz();
        if hz < lo || hz > hi {
            return Err(Error::Extrapolation(format!(
                "{:.3} GHz is outside the absorption table span {:.3}-{:.3} GHz",
                f.ghz(),
                lo / 1e9,
                hi / 1e9
            )));
        }
        let idx = match self
            .anchors
            .binary_search_by(|&(af, _)| af.partial_cmp(&hz).unwrap())
        {
            Ok(i) => return Ok(self.anchors[i].1),
            Err(i) => i,
        };
        let (f0, a0) = self.anchors[idx - 1];
        let (f1, a1) = self.anchors[idx];
        if a0 > 0.0 && a1 > 0.0 {
            let t = (hz.ln() - f0.ln()) / (f1.ln() - f0.ln());
            Ok((a0.ln() + t * (a1.ln() - a0.ln())).exp())
        } else {
            let t = (hz - f0) / (f1 - f0);
            Ok(a0 + t * (a1 - a0))
        }
    }
}

/// Beer-Lambert transmittance `exp(-kappa_a(f) * r)` over `distance_m`
/// meters at frequency `f`.
///
/// The absorption coefficient in nepers/m is derived from the table's dB/km
/// entries; the result lies in `(0, 1]`.
pub fn transmittance(
    distance_m: f64,
    f: Frequency,
    spectrum: &AbsorptionSpectrum,
) -> Result<PowerRatio> {
    if !distance_m.is_finite() || distance_m < 0.0 {
        return Err(Error::Domain(format!(
            "distance must be nonnegative, got {distance_m} m"
        )));
    }
    let att_db_per_km = spectrum.specific_attenuation_db_per_km(f)?;
    let kappa_per_m = att_db_per_km / (DB_PER_NEPER * 1e3);
    PowerRatio::from_linear((-kappa_per_m * distance_m).exp())
}

/// Rain specific-attenuation tables per frequency regime.
///
/// The low regime covers 28-38 GHz, the high regime 60 GHz and above. No
/// data exists in between or below; queries there are an error.
#[derive(Debug, Clone)]
pub struct RainTable {
    /// `(rain rate mm/hr, dB/km)` for the 28-38 GHz regime.
    low_band: Vec<(f64, f64)>,
    /// `(rain rate mm/hr, dB/km)` for >= 60 GHz.
    high_band: Vec<(f64, f64)>,
}

fn validate_rate_table(name: &str, table: &[(f64, f64)]) -> Result<()> {
    if table.len() < 2 {
        return Err(Error::Config(format!(
            "rain table {name} needs at least two anchors"
        )));
    }
    for w in table.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::Config(format!(
                "rain table {name} rates must be strictly increasing"
            )));
        }
        if w[0].1 > w[1].1 {
            return Err(Error::Config(format!(
                "rain table {name} attenuation must be non-decreasing in rate"
            )));
        }
    }
    if table.iter().any(|&(r, a)| r < 0.0 || a < 0.0) {
        return Err(Error::Config(format!(
            "rain table {name} entries must be nonnegative"
        )));
    }
    Ok(())
}

impl RainTable {
    pub fn new(low_band: Vec<(f64, f64)>, high_band: Vec<(f64, f64)>) -> Result<Self> {
        validate_rate_table("low-band", &low_band)?;
        validate_rate_table("high-band", &high_band)?;
        Ok(RainTable { low_band, high_band })
    }

    pub fn builtin() -> Self {
        TableSet::builtin()
            .rain
            .expect("builtin table file carries a rain table")
    }
}

/// Piecewise-linear read of `(rate, dB/km)` anchors. Exact at anchors;
/// rates beyond the last anchor clamp to the last value.
fn interp_rate(table: &[(f64, f64)], rate: f64) -> f64 {
    if let Some(&(_, a)) = table.iter().find(|&&(r, _)| r == rate) {
        return a;
    }
    let last = table[table.len() - 1];
    if rate >= last.0 {
        return last.1;
    }
    let idx = table.partition_point(|&(r, _)| r < rate);
    let (r0, a0) = table[idx - 1];
    let (r1, a1) = table[idx];
    a0 + (rate - r0) / (r1 - r0) * (a1 - a0)
}

/// Rain specific attenuation (dB/km) at frequency `f` and rain rate
/// `rate_mm_hr`.
pub fn rain_attenuation(f: Frequency, rate_mm_hr: f64, table: &RainTable) -> Result<f64> {
    if !rate_mm_hr.is_finite() || rate_mm_hr < 0.0 {
        return Err(Error::Domain(format!(
            "rain rate must be nonnegative, got {rate_mm_hr} mm/hr"
        )));
    }
    let ghz = f.ghz();
    let regime = if ghz >= 60.0 {
        &table.high_band
    } else if (28.0..=38.0).contains(&ghz) {
        &table.low_band
    } else {
        return Err(Error::UnsupportedRegime(format!(
            "no rain data for {ghz:.3} GHz (regimes: 28-38 GHz and >= 60 GHz)"
        )));
    };
    Ok(interp_rate(regime, rate_mm_hr))
}

/// Foliage loss anchors `(frequency, dB)` for a single-tree obstruction.
#[derive(Debug, Clone)]
pub struct FoliageTable {
    /// `(frequency Hz, loss dB)`, strictly increasing in frequency.
    anchors: Vec<(f64, f64)>,
}

impl FoliageTable {
    pub fn from_anchors_ghz(anchors_ghz: &[(f64, f64)]) -> Result<Self> {
        if anchors_ghz.len() < 2 {
            return Err(Error::Config(
                "foliage table needs at least two anchors".into(),
            ));
        }
        let anchors: Vec<(f64, f64)> =
            anchors_ghz.iter().map(|&(g, l)| (g * 1e9, l)).collect();
        if !anchors.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::Config(
                "foliage anchors must be strictly increasing in frequency".into(),
            ));
        }
        if anchors.iter().any(|&(f, l)| f <= 0.0 || l < 0.0) {
            return Err(Error::Config("foliage anchors must be nonnegative".into()));
        }
        Ok(FoliageTable { anchors })
    }

    pub fn builtin() -> Self {
        TableSet::builtin()
            .foliage
            .expect("builtin table file carries a foliage table")
    }
}

/// Foliage loss in dB at `f`, linearly interpolated between anchors.
pub fn foliage_loss(f: Frequency, table: &FoliageTable) -> Result<f64> {
    let hz = f.hz();
    let first = table.anchors[0];
    let last = table.anchors[table.anchors.len() - 1];
    if hz < first.0 || hz > last.0 {
        return Err(Error::Extrapolation(format!(
            "{:.3} GHz is outside the foliage table span {:.3}-{:.3} GHz",
            f.ghz(),
            first.0 / 1e9,
            last.0 / 1e9
        )));
    }
    let idx = match table
        .anchors
        .binary_search_by(|&(af, _)| af.partial_cmp(&hz).unwrap())
    {
        Ok(i) => return Ok(table.anchors[i].1),
        Err(i) => i,
    };
    let (f0, l0) = table.anchors[idx - 1];
    let (f1, l1) = table.anchors[idx];
    Ok(l0 + (hz - f0) / (f1 - f0) * (l1 - l0))
}

/// Measured 28 GHz indoor penetration scenarios. Two data points exist;
/// they are read verbatim, never interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenetrationScenario {
    TwoInteriorWalls,
    FourDoors,
}

/// Penetration loss in dB for a measured 28 GHz scenario.
pub fn penetration_loss_db(scenario: PenetrationScenario) -> f64 {
    match scenario {
        PenetrationScenario::TwoInteriorWalls => 24.4,
        PenetrationScenario::FourDoors => 45.1,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    schema_version: u32,
    absorption: Option<AbsorptionSection>,
    rain: Option<RainSection>,
    foliage: Option<FoliageSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbsorptionSection {
    anchors_ghz_db_per_km: Vec<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RainSection {
    low_band_mm_hr_db_per_km: Vec<(f64, f64)>,
    high_band_mm_hr_db_per_km: Vec<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FoliageSection {
    anchors_ghz_db: Vec<(f64, f64)>,
}

/// A loadable bundle of environmental-loss tables. Sections are optional so
/// a deployment can override just the spectrum.
#[derive(Debug, Clone, Default)]
pub struct TableSet {
    pub absorption: Option<AbsorptionSpectrum>,
    pub rain: Option<RainTable>,
    pub foliage: Option<FoliageTable>,
}

impl TableSet {
    pub fn from_toml_str(text: &str) -> Result<TableSet> {
        let file: TableFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("table file: {e}")))?;
        if file.schema_version != 1 {
            return Err(Error::Config(format!(
                "table file: unsupported schema_version {}",
                file.schema_version
            )));
        }
        Ok(TableSet {
            absorption: file
                .absorption
                .map(|s| AbsorptionSpectrum::from_anchors_ghz(&s.anchors_ghz_db_per_km))
                .transpose()?,
            rain: file
                .rain
                .map(|s| RainTable::new(s.low_band_mm_hr_db_per_km, s.high_band_mm_hr_db_per_km))
                .transpose()?,
            foliage: file
                .foliage
                .map(|s| FoliageTable::from_anchors_ghz(&s.anchors_ghz_db))
                .transpose()?,
        })
    }

    pub fn load(path: &Path) -> Result<TableSet> {
        let text = std::fs::read_to_string(path)?;
        TableSet::from_toml_str(&text)
    }

    pub fn builtin() -> TableSet {
        TableSet::from_toml_str(BUILTIN_TABLES_TOML)
            .expect("embedded table file must be valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn ghz(v: f64) -> Frequency {
        Frequency::from_ghz(v).unwrap()
    }

    #[test]
    fn zero_distance_is_unity() {
        let s = AbsorptionSpectrum::builtin();
        assert_eq!(transmittance(0.0, ghz(60.0), &s).unwrap().linear(), 1.0);
        assert_eq!(transmittance(0.0, ghz(183.0), &s).unwrap().linear(), 1.0);
    }

    #[test]
    fn oxygen_peak_60ghz_over_1km() {
        let s = AbsorptionSpectrum::builtin();
        let tau = transmittance(1000.0, ghz(60.0), &s).unwrap();
        assert_abs_diff_eq!(-tau.db(), 15.0, epsilon = 1e-9);
        assert_relative_eq!(tau.linear(), 0.0316, max_relative = 1e-3);
    }

    #[test]
    fn water_peak_183ghz_over_100m() {
        let s = AbsorptionSpectrum::builtin();
        let tau = transmittance(100.0, ghz(183.0), &s).unwrap();
        assert_abs_diff_eq!(-tau.db(), 2.835, epsilon = 1e-9);
        assert_relative_eq!(tau.linear(), 0.5207, max_relative = 1e-3);
    }

    #[test]
    fn negative_distance_is_domain_error() {
        let s = AbsorptionSpectrum::builtin();
        assert!(matches!(
            transmittance(-1.0, ghz(60.0), &s),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn out_of_table_frequency_is_extrapolation_error() {
        let s = AbsorptionSpectrum::builtin();
        assert!(matches!(
            transmittance(10.0, ghz(10.0), &s),
            Err(Error::Extrapolation(_))
        ));
        assert!(matches!(
            transmittance(10.0, ghz(900.0), &s),
            Err(Error::Extrapolation(_))
        ));
    }

    #[test]
    fn interpolation_hits_anchors_and_stays_positive() {
        let s = AbsorptionSpectrum::builtin();
        assert_eq!(
            s.specific_attenuation_db_per_km(ghz(119.0)).unwrap(),
            1.4
        );
        // Between anchors: positive and between the endpoints' min/max is not
        // guaranteed physically, but log-log interpolation keeps it within.
        let mid = s.specific_attenuation_db_per_km(ghz(90.0)).unwrap();
        assert!(mid > 1.4 && mid < 15.0);
    }

    #[test]
    fn rain_anchor_reads() {
        let t = RainTable::builtin();
        assert_eq!(rain_attenuation(ghz(60.0), 2.0, &t).unwrap(), 2.55);
        assert_eq!(rain_attenuation(ghz(73.0), 50.0, &t).unwrap(), 20.0);
        assert_eq!(rain_attenuation(ghz(60.0), 150.0, &t).unwrap(), 42.0);
        assert_eq!(rain_attenuation(ghz(28.0), 50.0, &t).unwrap(), 7.0);
        assert_eq!(rain_attenuation(ghz(28.0), 0.0, &t).unwrap(), 0.0);
    }

    #[test]
    fn heavy_rain_28ghz_over_200m_total() {
        let t = RainTable::builtin();
        let per_km = rain_attenuation(ghz(28.0), 50.0, &t).unwrap();
        assert_relative_eq!(per_km * 200.0 / 1000.0, 1.4, max_relative = 1e-12);
    }

    #[test]
    fn rain_unsupported_regimes() {
        let t = RainTable::builtin();
        assert!(matches!(
            rain_attenuation(ghz(10.0), 10.0, &t),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(matches!(
            rain_attenuation(ghz(45.0), 10.0, &t),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn foliage_reference_points() {
        let t = FoliageTable::builtin();
        assert_eq!(foliage_loss(ghz(28.0), &t).unwrap(), 17.0);
        assert_eq!(foliage_loss(ghz(90.0), &t).unwrap(), 25.0);
        assert_relative_eq!(foliage_loss(ghz(44.0), &t).unwrap(), 19.5, epsilon = 1e-12);
        assert!(matches!(
            foliage_loss(ghz(20.0), &t),
            Err(Error::Extrapolation(_))
        ));
        assert!(matches!(
            foliage_loss(ghz(120.0), &t),
            Err(Error::Extrapolation(_))
        ));
    }

    #[test]
    fn penetration_is_verbatim() {
        assert_eq!(penetration_loss_db(PenetrationScenario::TwoInteriorWalls), 24.4);
        assert_eq!(penetration_loss_db(PenetrationScenario::FourDoors), 45.1);
    }

    #[test]
    fn table_file_round_trip_matches_builtin() {
        let set = TableSet::from_toml_str(BUILTIN_TABLES_TOML).unwrap();
        let s = set.absorption.unwrap();
        assert_eq!(
            s.specific_attenuation_db_per_km(ghz(60.0)).unwrap(),
            15.0
        );
        let r = set.rain.unwrap();
        assert_eq!(rain_attenuation(ghz(60.0), 2.0, &r).unwrap(), 2.55);
    }

    #[test]
    fn table_file_rejects_unknown_keys() {
        let text = "schema_version = 1\n[absorption]\nanchors_ghz_db_per_km = [[23.0, 0.18], [60.0, 15.0]]\nbogus = 1\n";
        assert!(TableSet::from_toml_str(text).is_err());
    }

    proptest! {
        // Beer-Lambert semigroup property.
        #[test]
        fn transmittance_is_multiplicative(
            r1 in 0.0f64..5e3,
            r2 in 0.0f64..5e3,
            g in 23.0f64..800.0,
        ) {
            let s = AbsorptionSpectrum::builtin();
            let f = ghz(g);
            let whole = transmittance(r1 + r2, f, &s).unwrap().linear();
            let parts = transmittance(r1, f, &s).unwrap().linear()
                * transmittance(r2, f, &s).unwrap().linear();
            prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(parts));
        }

        #[test]
        fn transmittance_non_increasing_in_distance(
            r in 0.0f64..1e4,
            dr in 1e-6f64..1e4,
            g in 23.0f64..800.0,
        ) {
            let s = AbsorptionSpectrum::builtin();
            let f = ghz(g);
            let near = transmittance(r, f, &s).unwrap().linear();
            let far = transmittance(r + dr, f, &s).unwrap().linear();
            prop_assert!(far <= near);
            prop_assert!(near <= 1.0 && far >= 0.0);
            // Strictly decreasing wherever the exponential is representable;
            // extreme paths underflow to exactly 0.0.
            if far > 0.0 {
                prop_assert!(far < near);
            }
        }

        #[test]
        fn rain_monotone_in_rate(
            ra in 0.0f64..200.0,
            rb in 0.0f64..200.0,
            g in 60.0f64..100.0,
        ) {
            let t = RainTable::builtin();
            let f = ghz(g);
            let (lo, hi) = if ra <= rb { (ra, rb) } else { (rb, ra) };
            let a_lo = rain_attenuation(f, lo, &t).unwrap();
            let a_hi = rain_attenuation(f, hi, &t).unwrap();
            prop_assert!(a_lo <= a_hi);
        }
    }
}
