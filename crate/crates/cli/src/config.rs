//! Run configuration: defaults for every subcommand, loadable from TOML or
//! JSON and echoed into each report.

use std::path::{Path, PathBuf};

use contact_forge::contact::{Boundary, CharFolConfig, FamilyConfig, GSpec};
use contact_forge::monodromy::MonodromyConfig;
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "CONTACT_FORGE_CONFIG";

/// Tolerances applied by the library checks. They are fixed in code and
/// recorded here so every report states which thresholds produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub symbolic_match: f64,
    pub integrability: f64,
    pub positivity: f64,
}

impl Tolerances {
    pub const PINNED: Tolerances = Tolerances { symbolic_match: 1e-9, integrability: 1e-10, positivity: 1e-12 };
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::PINNED
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySection {
    pub ts: Vec<f64>,
    pub model: FamilyConfig,
}

impl Default for FamilySection {
    fn default() -> Self {
        FamilySection { ts: vec![0.0, 0.25, 0.5, 0.75, 0.99, 1.0], model: FamilyConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MilnorSection {
    pub delta: f64,
    pub radius: f64,
}

impl Default for MilnorSection {
    fn default() -> Self {
        MilnorSection { delta: 1e-8, radius: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnosovSection {
    pub matrix: [i64; 4],
    /// Points per axis; the grid has `grid⁴` samples.
    pub grid: usize,
}

impl Default for AnosovSection {
    fn default() -> Self {
        AnosovSection { matrix: [2, 1, 1, 1], grid: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharFolSection {
    pub search: CharFolConfig,
    /// Random samples for the flow identities and rescaling test.
    pub samples: usize,
}

impl Default for CharFolSection {
    fn default() -> Self {
        CharFolSection {
            search: CharFolConfig { boundary: Boundary::Sphere { radius: 1.0 }, ..CharFolConfig::default() },
            samples: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlastikstufeSection {
    pub eps: f64,
    pub matrix: [i64; 4],
    pub g: GSpec,
}

impl Default for PlastikstufeSection {
    fn default() -> Self {
        PlastikstufeSection { eps: 0.1, matrix: [2, 1, 1, 1], g: GSpec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContactizationSection {
    pub eps: f64,
    pub matrix: [i64; 4],
    pub grid: usize,
}

impl Default for ContactizationSection {
    fn default() -> Self {
        ContactizationSection { eps: 0.3, matrix: [2, 1, 1, 1], grid: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub family: FamilySection,
    pub monodromy: MonodromyConfig,
    pub milnor: MilnorSection,
    pub anosov: AnosovSection,
    pub charfol: CharFolSection,
    pub plastikstufe: PlastikstufeSection,
    pub contactization: ContactizationSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 20240601,
            tolerances: Tolerances::default(),
            family: FamilySection::default(),
            monodromy: MonodromyConfig::default(),
            milnor: MilnorSection::default(),
            anosov: AnosovSection::default(),
            charfol: CharFolSection::default(),
            plastikstufe: PlastikstufeSection::default(),
            contactization: ContactizationSection::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid TOML config {0}: {1}")]
    Toml(PathBuf, toml::de::Error),
    #[error("invalid JSON config {0}: {1}")]
    Json(PathBuf, serde_json::Error),
    #[error("tolerances are fixed in code ({pinned:?}); the config asked for {found:?}")]
    Tolerances { pinned: Tolerances, found: Tolerances },
}

impl Config {
    pub fn parse(path: &Path, text: &str) -> Result<Config, ConfigError> {
        let cfg: Config = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(text).map_err(|e| ConfigError::Json(path.into(), e))?
        } else {
            toml::from_str(text).map_err(|e| ConfigError::Toml(path.into(), e))?
        };
        if cfg.tolerances != Tolerances::PINNED {
            return Err(ConfigError::Tolerances { pinned: Tolerances::PINNED, found: cfg.tolerances });
        }
        Ok(cfg)
    }

    /// Reads `explicit`, else the file named by `CONTACT_FORGE_CONFIG`, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Config, ConfigError> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => PathBuf::from(p),
                _ => return Ok(Config::default()),
            },
        };
        let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::Io(path.clone(), e))?;
        Config::parse(&path, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = Config::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(Config::parse(Path::new("c.toml"), &text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let cfg = Config::parse(Path::new("c.toml"), "seed = 7\n[milnor]\ndelta = 1e-9\n").unwrap();
        assert_eq!((cfg.seed, cfg.milnor.delta, cfg.milnor.radius), (7, 1e-9, 0.5));
        assert_eq!(cfg.anosov, AnosovSection::default());
        let json = Config::parse(Path::new("c.json"), r#"{"anosov": {"grid": 4}}"#).unwrap();
        assert_eq!(json.anosov.grid, 4);
    }

    #[test]
    fn rejects_unknown_keys_and_moved_tolerances() {
        assert!(Config::parse(Path::new("c.toml"), "sede = 1\n").is_err());
        assert!(matches!(
            Config::parse(
                Path::new("c.toml"),
                "[tolerances]\nsymbolic_match = 1e-3\nintegrability = 1e-10\npositivity = 1e-12\n"
            ),
            Err(ConfigError::Tolerances { .. })
        ));
    }
}
