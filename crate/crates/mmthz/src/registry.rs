//! Machine-readable registry of candidate mmWave/THz communication bands,
//! queryable by frequency.
//!
//! The registry ships as a versioned TOML data file (`data/bands.toml`)
//! embedded at compile time and reloadable from disk, so deployments can
//! extend it as spectrum allocations evolve.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantity::Frequency;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandCategory {
    Mmwave,
    Thz,
}

/// One named band: a set of closed `[low, high]` frequency segments in GHz.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub name: String,
    pub category: BandCategory,
    /// Closed intervals in GHz, in allocation order. Segments of one band
    /// may touch or nest; containment queries are unaffected.
    pub segments_ghz: Vec<(f64, f64)>,
    pub remarks: String,
}

impl Band {
    /// True if any segment contains `f` (closed endpoints).
    pub fn contains(&self, f: Frequency) -> bool {
        let ghz = f.ghz();
        self.segments_ghz
            .iter()
            .any(|&(lo, hi)| ghz >= lo && ghz <= hi)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    schema_version: u32,
    #[serde(rename = "band")]
    bands: Vec<Band>,
}

/// Immutable band registry. Safe for concurrent reads after construction.
#[derive(Debug, Clone)]
pub struct Registry {
    schema_version: u32,
    bands: Vec<Band>,
}

/// The shipped registry data, embedded verbatim.
pub const BUILTIN_BANDS_TOML: &str = include_str!("../data/bands.toml");

impl Registry {
    /// The registry shipped with the crate.
    pub fn builtin() -> Registry {
        Registry::from_toml_str(BUILTIN_BANDS_TOML)
            .expect("embedded band registry must be valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Registry> {
        let file: RegistryFile = toml::from_str(text)
            .map_err(|e| Error::Config(format!("band registry: {e}")))?;
        if file.schema_version != 1 {
            return Err(Error::Config(format!(
                "band registry: unsupported schema_version {}",
                file.schema_version
            )));
        }
        for band in &file.bands {
            if band.segments_ghz.is_empty() {
                return Err(Error::Config(format!(
                    "band registry: band {:?} has no segments",
                    band.name
                )));
            }
            for &(lo, hi) in &band.segments_ghz {
                if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || lo >= hi {
                    return Err(Error::Config(format!(
                        "band registry: band {:?} has invalid segment [{lo}, {hi}] GHz",
                        band.name
                    )));
                }
            }
        }
        Ok(Registry {
            schema_version: file.schema_version,
            bands: file.bands,
        })
    }

    pub fn load(path: &Path) -> Result<Registry> {
        let text = std::fs::read_to_string(path)?;
        Registry::from_toml_str(&text)
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// All bands with at least one segment containing `f`.
    pub fn lookup(&self, f: Frequency) -> Vec<&Band> {
        self.bands.iter().filter(|b| b.contains(f)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz(v: f64) -> Frequency {
        Frequency::from_ghz(v).unwrap()
    }

    #[test]
    fn lookup_60_5_ghz() {
        let reg = Registry::builtin();
        let hits = reg.lookup(ghz(60.5));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].name, "60 GHz lower band");
        assert_eq!(hits[0].segments_ghz, vec![(57.0, 64.0)]);
    }

    #[test]
    fn lookup_83_ghz() {
        let reg = Registry::builtin();
        let hits = reg.lookup(ghz(83.0));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].name, "70/80/90 GHz band");
    }

    #[test]
    fn lookup_below_all_segments_is_empty() {
        let reg = Registry::builtin();
        assert!(reg.lookup(ghz(5.0)).is_empty());
    }

    #[test]
    fn closed_endpoints_are_inclusive() {
        let reg = Registry::builtin();
        // 64 GHz is the shared endpoint of the two 60 GHz bands.
        let names: Vec<_> = reg.lookup(ghz(64.0)).iter().map(|b| &b.name).collect();
        assert_eq!(names, ["60 GHz lower band", "60 GHz upper band"]);
    }

    #[test]
    fn rejects_inverted_segment() {
        let text = r#"
schema_version = 1
[[band]]
name = "bad"
category = "mmwave"
segments_ghz = [[30.0, 20.0]]
remarks = ""
"#;
        assert!(matches!(
            Registry::from_toml_str(text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn rejects_unknown_schema_version() {
        let text = r#"
schema_version = 2
[[band]]
name = "x"
category = "thz"
segments_ghz = [[300.0, 310.0]]
remarks = ""
"#;
        assert!(Registry::from_toml_str(text).is_err());
    }
}
