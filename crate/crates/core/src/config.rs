//! Configuration file (TOML) and per-scenario resolved configuration.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fuel::{FuelNames, FuelType};
use crate::ingest::{FuelParamEntry, FuelParamTable, DEFAULT_ZSCORE_THRESHOLD};
use crate::merit_order::{EfficiencyEnvelope, EnvelopeBounds, Method};

const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "CEFSIM_CONFIG";

fn one() -> f64 {
    1.0
}

fn default_threshold() -> f64 {
    DEFAULT_ZSCORE_THRESHOLD
}

/// Key of the cross-country fallback table in `avg_plant_size_mw`.
pub const DEFAULT_SIZES_KEY: &str = "default";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "one")]
    pub dt_hours: f64,
    #[serde(default = "default_threshold")]
    pub zscore_threshold: f64,
    /// Country code -> transmission and distribution efficiency.
    #[serde(default)]
    pub transmission_efficiency: BTreeMap<String, f64>,
    /// Country code -> share of combined-cycle gas capacity.
    #[serde(default)]
    pub k_cc: BTreeMap<String, f64>,
    /// Year -> annual carbon price, EUR/t.
    #[serde(default)]
    pub carbon_price: BTreeMap<String, f64>,
    #[serde(default)]
    pub envelope: BTreeMap<FuelType, EnvelopeBounds>,
    /// Country code (or `default`) -> fuel -> average plant size, MW.
    #[serde(default)]
    pub avg_plant_size_mw: BTreeMap<String, BTreeMap<FuelType, f64>>,
    /// Extra external labels for the fuel renaming table.
    #[serde(default)]
    pub fuel_names: BTreeMap<String, FuelType>,
    #[serde(default)]
    pub fuel_params: Vec<FuelParamEntry>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// The bundled default configuration.
    pub fn bundled() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("bundled config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_hours > 0.0) {
            return Err(Error::Config(format!(
                "dt_hours must be positive, got {}",
                self.dt_hours
            )));
        }
        if !(self.zscore_threshold > 0.0) {
            return Err(Error::Config("zscore_threshold must be positive".into()));
        }
        for (c, eta) in &self.transmission_efficiency {
            if !(*eta > 0.0 && *eta <= 1.0) {
                return Err(Error::Config(format!(
                    "transmission efficiency for {c} must be in (0, 1], got {eta}"
                )));
            }
        }
        for (c, k) in &self.k_cc {
            if !(0.0..=1.0).contains(k) {
                return Err(Error::Config(format!(
                    "k_cc for {c} must be in [0, 1], got {k}"
                )));
            }
        }
        for (y, p) in &self.carbon_price {
            y.parse::<i32>()
                .map_err(|_| Error::Config(format!("carbon_price key '{y}' is not a year")))?;
            if !(*p >= 0.0) {
                return Err(Error::Config(format!(
                    "carbon price for {y} must be non-negative"
                )));
            }
        }
        for (f, b) in &self.envelope {
            b.validate()
                .map_err(|e| Error::Config(format!("envelope {f}: {e}")))?;
        }
        for (c, sizes) in &self.avg_plant_size_mw {
            for (f, s) in sizes {
                if !(*s > 0.0) {
                    return Err(Error::Config(format!(
                        "average size {c}/{f} must be positive"
                    )));
                }
            }
        }
        FuelParamTable::new(self.fuel_params.clone())?;
        Ok(())
    }

    /// SHA-256 over the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn fuel_names(&self) -> FuelNames {
        let mut names = FuelNames::default();
        for (label, fuel) in &self.fuel_names {
            names.insert(label.clone(), *fuel);
        }
        names
    }

    pub fn fuel_param_table(&self) -> FuelParamTable {
        FuelParamTable {
            entries: self.fuel_params.clone(),
        }
    }

    pub fn carbon_price(&self, year: i32) -> Option<f64> {
        self.carbon_price.get(&year.to_string()).copied()
    }

    pub fn envelope(&self) -> EfficiencyEnvelope {
        EfficiencyEnvelope(self.envelope.clone())
    }

    /// Average plant sizes for `country`, falling back per fuel to the
    /// cross-country `default` table.
    pub fn avg_sizes(&self, country: &str) -> BTreeMap<FuelType, f64> {
        let mut sizes = self
            .avg_plant_size_mw
            .get(DEFAULT_SIZES_KEY)
            .cloned()
            .unwrap_or_default();
        if let Some(own) = self.avg_plant_size_mw.get(country) {
            sizes.extend(own.iter().map(|(f, s)| (*f, *s)));
        }
        sizes
    }

    /// Resolve the configuration of one scenario.
    pub fn scenario(
        &self,
        country: &str,
        year: i32,
        method: Method,
        c_ghg: f64,
    ) -> Result<ScenarioConfig> {
        let eta_t = *self
            .transmission_efficiency
            .get(country)
            .ok_or_else(|| Error::Config(format!("no transmission efficiency for {country}")))?;
        let sc = ScenarioConfig {
            country: country.to_string(),
            year,
            method,
            c_ghg,
            eta_t,
            dt_hours: self.dt_hours,
            k_cc: self.k_cc.get(country).copied(),
            avg_plant_size_mw: self.avg_sizes(country),
            envelope: self.envelope(),
            config_hash: self.hash(),
        };
        sc.validate()?;
        Ok(sc)
    }
}

impl Default for Config {
    fn default() -> Self {
        Self::bundled()
    }
}

/// Everything a single country-year-method computation needs besides data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub country: String,
    pub year: i32,
    pub method: Method,
    /// Carbon price, EUR/t.
    pub c_ghg: f64,
    /// Transmission and distribution efficiency.
    pub eta_t: f64,
    pub dt_hours: f64,
    pub k_cc: Option<f64>,
    pub avg_plant_size_mw: BTreeMap<FuelType, f64>,
    pub envelope: EfficiencyEnvelope,
    pub config_hash: String,
}

impl ScenarioConfig {
    /// A configuration with no plant sizes or envelopes, for building merit
    /// orders directly from plants.
    pub fn minimal(country: &str, year: i32, method: Method, c_ghg: f64, eta_t: f64) -> Self {
        ScenarioConfig {
            country: country.to_string(),
            year,
            method,
            c_ghg,
            eta_t,
            dt_hours: 1.0,
            k_cc: None,
            avg_plant_size_mw: BTreeMap::new(),
            envelope: EfficiencyEnvelope::default(),
            config_hash: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta_t > 0.0 && self.eta_t <= 1.0) {
            return Err(Error::Config(format!(
                "transmission efficiency must be in (0, 1], got {}",
                self.eta_t
            )));
        }
        if let Some(k) = self.k_cc {
            if !(0.0..=1.0).contains(&k) {
                return Err(Error::Config(format!("k_cc must be in [0, 1], got {k}")));
            }
        }
        if !(self.dt_hours > 0.0) {
            return Err(Error::Config("dt_hours must be positive".into()));
        }
        if !(self.c_ghg >= 0.0) {
            return Err(Error::Config(format!(
                "carbon price must be non-negative, got {}",
                self.c_ghg
            )));
        }
        for b in self.envelope.0.values() {
            b.validate()?;
        }
        Ok(())
    }

    pub fn with_carbon_price(&self, c_ghg: f64) -> Self {
        ScenarioConfig {
            c_ghg,
            ..self.clone()
        }
    }
}
