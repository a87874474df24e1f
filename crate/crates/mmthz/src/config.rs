//! Scenario configuration files.
//!
//! One TOML document can describe the shared loss tables, a point-to-point
//! link, and a network deployment, so the link-budget and simulation
//! subcommands work from the same data. The schema is versioned, rejects
//! unknown keys, and carries explicit units in every key name. Values are
//! in dB at this boundary and converted to linear units on build.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::antenna::{AntennaPattern, Lobe, DEFAULT_SPACING_OVER_LAMBDA};
use crate::atmosphere::TableSet;
use crate::blockage::LosModel;
use crate::channel::{
    BandKind, FadingSpec, LinkScenario, LinkState, PathLossLaw, StatePathLoss,
};
use crate::error::{Error, Result};
use crate::netsim::{Alignment, NetworkScenario};
use crate::quantity::{db_to_linear, dbm_to_watt, Frequency};

/// Environment variable naming the default directory for table/config data.
pub const DATA_DIR_ENV: &str = "MMTHZ_DATA_DIR";

/// Resolve a possibly relative data path: as given if it exists, otherwise
/// under `MMTHZ_DATA_DIR`.
pub fn resolve_data_path(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub tables: Option<TablesConfig>,
    pub link: Option<LinkConfig>,
    pub network: Option<NetworkConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesConfig {
    /// Path to a propagation-tables file; relative paths resolve against
    /// the config file's directory, then `MMTHZ_DATA_DIR`.
    pub file: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossLawConfig {
    pub near_field_gain_db: f64,
    pub exponent: f64,
}

impl PathLossLawConfig {
    fn build(&self) -> Result<PathLossLaw> {
        let law = PathLossLaw {
            near_field_gain: db_to_linear(self.near_field_gain_db)?.linear(),
            exponent: self.exponent,
        };
        law.validate()?;
        Ok(law)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePathLossConfig {
    pub los: PathLossLawConfig,
    pub nlos: PathLossLawConfig,
}

impl StatePathLossConfig {
    fn build(&self) -> Result<StatePathLoss> {
        Ok(StatePathLoss {
            los: self.los.build()?,
            nlos: self.nlos.build()?,
        })
    }
}

/// Default path-loss pair when a config omits it: free space for LOS and
/// the same intercept with a fourth-power falloff for NLOS.
fn default_pathloss(f: Frequency) -> StatePathLoss {
    let friis = PathLossLaw::friis(f);
    StatePathLoss {
        los: friis,
        nlos: PathLossLaw {
            near_field_gain: friis.near_field_gain,
            exponent: 4.0,
        },
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    pub mu_los: f64,
    pub mu_nlos: f64,
}

impl FadingConfig {
    fn build(&self) -> Result<FadingSpec> {
        let spec = FadingSpec {
            mu_los: self.mu_los,
            mu_nlos: self.mu_nlos,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiLobeEntry {
    pub width_rad: f64,
    pub gain_db: f64,
}

/// Antenna pattern description with dB gains at the config boundary.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternConfig {
    Ula {
        elements: u32,
        spacing_over_lambda: Option<f64>,
    },
    Sinc {
        elements: u32,
    },
    FlatTop {
        main_gain_db: f64,
        side_gain_db: f64,
        theta_3db_rad: f64,
    },
    MultiLobe {
        lobes: Vec<MultiLobeEntry>,
    },
    Gaussian {
        main_gain_db: f64,
        side_gain_db: f64,
        eta: f64,
    },
    Cosine {
        elements: u32,
    },
}

impl PatternConfig {
    pub fn build(&self) -> Result<AntennaPattern> {
        let pattern = match self {
            PatternConfig::Ula {
                elements,
                spacing_over_lambda,
            } => AntennaPattern::UlaExact {
                elements: *elements,
                spacing_over_lambda: spacing_over_lambda
                    .unwrap_or(DEFAULT_SPACING_OVER_LAMBDA),
            },
            PatternConfig::Sinc { elements } => AntennaPattern::SincApprox {
                elements: *elements,
            },
            PatternConfig::FlatTop {
                main_gain_db,
                side_gain_db,
                theta_3db_rad,
            } => AntennaPattern::FlatTop {
                main_gain: db_to_linear(*main_gain_db)?.linear(),
                side_gain: db_to_linear(*side_gain_db)?.linear(),
                theta_3db_rad: *theta_3db_rad,
            },
            PatternConfig::MultiLobe { lobes } => AntennaPattern::MultiLobe {
                lobes: lobes
                    .iter()
                    .map(|l| {
                        Ok(Lobe {
                            width_rad: l.width_rad,
                            gain: db_to_linear(l.gain_db)?.linear(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            },
            PatternConfig::Gaussian {
                main_gain_db,
                side_gain_db,
                eta,
            } => AntennaPattern::Gaussian {
                main_gain: db_to_linear(*main_gain_db)?.linear(),
                side_gain: db_to_linear(*side_gain_db)?.linear(),
                eta: *eta,
            },
            PatternConfig::Cosine { elements } => AntennaPattern::Cosine {
                elements: *elements,
            },
        };
        pattern.validate()?;
        Ok(pattern)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub band: BandKind,
    pub freq_ghz: f64,
    pub dist_m: f64,
    pub pt_dbm: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub state: LinkState,
    pub mu_los: f64,
    pub mu_nlos: f64,
    pub pathloss: Option<StatePathLossConfig>,
}

impl LinkConfig {
    pub fn build(&self, tables: Option<&TableSet>) -> Result<LinkScenario> {
        let frequency = Frequency::from_ghz(self.freq_ghz)?;
        let pathloss = match &self.pathloss {
            Some(cfg) => cfg.build()?,
            None => default_pathloss(frequency),
        };
        let fading = FadingSpec {
            mu_los: self.mu_los,
            mu_nlos: self.mu_nlos,
        };
        fading.validate()?;
        let spectrum = tables
            .and_then(|t| t.absorption.clone())
            .or_else(|| Some(crate::atmosphere::AbsorptionSpectrum::builtin()));
        Ok(LinkScenario {
            band: self.band,
            frequency,
            distance_m: self.dist_m,
            state: self.state,
            tx_power_w: dbm_to_watt(self.pt_dbm)?,
            tx_gain: db_to_linear(self.tx_gain_db)?.linear(),
            rx_gain: db_to_linear(self.rx_gain_db)?.linear(),
            pathloss,
            fading,
            spectrum,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub bs_density_per_m2: f64,
    pub window_radius_m: f64,
    pub band: BandKind,
    pub freq_ghz: f64,
    pub pt_dbm: f64,
    pub noise_dbm: f64,
    pub bandwidth_hz: f64,
    pub alignment: Alignment,
    pub los_model: LosModel,
    pub pathloss: Option<StatePathLossConfig>,
    pub fading: Option<FadingConfig>,
    pub tx_pattern: PatternConfig,
    pub rx_pattern: PatternConfig,
    pub self_block_cone_rad: Option<f64>,
    pub interference: Option<bool>,
    /// Attach the tables' absorption spectrum to THz links (default true).
    pub use_absorption: Option<bool>,
    pub sinr_thresholds_db: Option<Vec<f64>>,
    pub trials: Option<u64>,
}

impl NetworkConfig {
    pub fn build(&self, tables: Option<&TableSet>) -> Result<NetworkScenario> {
        let carrier = Frequency::from_ghz(self.freq_ghz)?;
        let pathloss = match &self.pathloss {
            Some(cfg) => cfg.build()?,
            None => default_pathloss(carrier),
        };
        let absorption = if self.use_absorption.unwrap_or(true) {
            match self.band {
                BandKind::Thz => Some(
                    tables
                        .and_then(|t| t.absorption.clone())
                        .unwrap_or_else(crate::atmosphere::AbsorptionSpectrum::builtin),
                ),
                BandKind::Mmwave => None,
            }
        } else {
            None
        };
        let scenario = NetworkScenario {
            bs_density_per_m2: self.bs_density_per_m2,
            window_radius_m: self.window_radius_m,
            band: self.band,
            carrier,
            los_model: self.los_model,
            pathloss,
            fading: self.fading.as_ref().map(|f| f.build()).transpose()?,
            tx_pattern: self.tx_pattern.build()?,
            rx_pattern: self.rx_pattern.build()?,
            tx_power_w: dbm_to_watt(self.pt_dbm)?,
            noise_power_w: dbm_to_watt(self.noise_dbm)?,
            bandwidth_hz: self.bandwidth_hz,
            alignment: self.alignment,
            absorption,
            self_block_cone_rad: self.self_block_cone_rad,
            interference: self.interference,
            fixed_bs: None,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<ScenarioConfig> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("scenario config: {e}")))?;
        if config.schema_version != 1 {
            return Err(Error::Config(format!(
                "scenario config: unsupported schema_version {}",
                config.schema_version
            )));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        ScenarioConfig::from_toml_str(&text)
    }

    /// Load the referenced table file, if any, resolving relative paths
    /// against `base_dir` and then `MMTHZ_DATA_DIR`.
    pub fn load_tables(&self, base_dir: Option<&Path>) -> Result<Option<TableSet>> {
        let Some(tables) = &self.tables else {
            return Ok(None);
        };
        let raw = &tables.file;
        let candidate = match base_dir {
            Some(dir) if raw.is_relative() && dir.join(raw).exists() => dir.join(raw),
            _ => resolve_data_path(raw),
        };
        Ok(Some(TableSet::load(&candidate)?))
    }
}

/// The shipped example deployment, also used as the simulator's default.
pub const EXAMPLE_SCENARIO_TOML: &str = include_str!("../data/example_scenario.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_scenario_builds() {
        let config = ScenarioConfig::from_toml_str(EXAMPLE_SCENARIO_TOML).unwrap();
        let network = config.network.as_ref().unwrap();
        let scenario = network.build(None).unwrap();
        assert_eq!(scenario.bs_density_per_m2, 1e-4);
        assert_eq!(scenario.window_radius_m, 1000.0);
        assert_eq!(network.trials, Some(10_000));
        let link = config.link.as_ref().unwrap();
        link.build(None).unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "schema_version = 1\nbogus_key = 3\n";
        assert!(matches!(
            ScenarioConfig::from_toml_str(text),
            Err(Error::Config(_))
        ));
        let nested = r#"
schema_version = 1
[network]
bs_density_per_m2 = 1e-4
window_radius_m = 1000.0
band = "mmwave"
freq_ghz = 60.0
pt_dbm = 30.0
noise_dbm = -90.0
bandwidth_hz = 1e8
alignment = "random-interferer-angles"
not_a_field = true
[network.los_model]
model = "uma_umi"
d1_m = 18.0
d2_m = 63.0
[network.tx_pattern]
model = "sinc"
elements = 16
[network.rx_pattern]
model = "sinc"
elements = 16
"#;
        assert!(ScenarioConfig::from_toml_str(nested).is_err());
    }

    #[test]
    fn schema_version_is_enforced() {
        assert!(ScenarioConfig::from_toml_str("schema_version = 99\n").is_err());
    }

    #[test]
    fn pattern_config_gains_convert_from_db() {
        let cfg = PatternConfig::FlatTop {
            main_gain_db: 20.0,
            side_gain_db: -10.0,
            theta_3db_rad: 0.2,
        };
        let AntennaPattern::FlatTop { main_gain, side_gain, .. } = cfg.build().unwrap() else {
            panic!()
        };
        assert!((main_gain - 100.0).abs() < 1e-12);
        assert!((side_gain - 0.1).abs() < 1e-12);
    }
}
