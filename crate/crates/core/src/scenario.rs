//! Glue from loaded inputs to a merit order and a CEF series for one
//! country, year and method.

use std::collections::BTreeMap;

use crate::config::ScenarioConfig;
use crate::dispatch::{compute_cef_series, CefSeries};
use crate::error::{Error, Result};
use crate::fuel::FuelType;
use crate::ingest::{FuelParams, GenerationSeries, PowerPlant};
use crate::merit_order::{
    build_merit_order_pp, build_merit_order_pwl, capacities_from_plants,
    efficiency_envelope_from_regression, MeritOrder, Method,
};

/// Everything needed to build the merit order of one scenario at any
/// carbon price.
#[derive(Debug, Clone)]
pub struct MeritOrderSource {
    pub config: ScenarioConfig,
    pub params: FuelParams,
    /// Active plants of the scenario's country and year (PP, PWLv).
    pub plants: Option<Vec<PowerPlant>>,
    /// Installed capacity per fuel (PWL).
    pub installed: Option<BTreeMap<FuelType, f64>>,
}

impl MeritOrderSource {
    pub fn new(config: ScenarioConfig, params: FuelParams) -> Self {
        MeritOrderSource {
            config,
            params,
            plants: None,
            installed: None,
        }
    }

    pub fn with_plants(mut self, plants: Vec<PowerPlant>) -> Self {
        self.plants = Some(plants);
        self
    }

    pub fn with_installed(mut self, installed: BTreeMap<FuelType, f64>) -> Self {
        self.installed = Some(installed);
        self
    }

    /// Merit order at the configured carbon price.
    pub fn build(&self) -> Result<MeritOrder> {
        self.build_at(self.config.c_ghg)
    }

    /// Merit order at carbon price `c_ghg`.
    pub fn build_at(&self, c_ghg: f64) -> Result<MeritOrder> {
        let config = self.config.with_carbon_price(c_ghg);
        config.validate()?;
        let sc = format!("({}, {})", config.country, config.year);
        match config.method {
            Method::Pp => {
                let plants = self
                    .plants
                    .as_ref()
                    .ok_or_else(|| Error::Missing(format!("PP requires a plant list for {sc}")))?;
                Ok(build_merit_order_pp(plants, &self.params, c_ghg)?
                    .with_config_hash(config.config_hash))
            }
            Method::Pwl => {
                let caps = self
                    .installed
                    .as_ref()
                    .ok_or_else(|| Error::Missing(format!("installed capacity for {sc}")))?;
                build_merit_order_pwl(caps, &config, &self.params)
            }
            Method::Pwlv => {
                let plants = self
                    .plants
                    .as_ref()
                    .ok_or_else(|| Error::Missing("PWLv requires plant-list capacities".into()))?;
                // configured envelopes first, fitted ones for fuels the
                // configuration does not cover
                let mut config = config;
                for (fuel, bounds) in efficiency_envelope_from_regression(plants).0 {
                    config.envelope.0.entry(fuel).or_insert(bounds);
                }
                build_merit_order_pwl(&capacities_from_plants(plants), &config, &self.params)
            }
        }
    }
}

/// Merit order and hourly series of one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub merit_order: MeritOrder,
    pub cef: CefSeries,
}

/// Build the merit order and dispatch it against a filled hourly series.
pub fn run_scenario(source: &MeritOrderSource, gen: &GenerationSeries) -> Result<ScenarioOutput> {
    run_scenario_at(source, gen, source.config.c_ghg)
}

/// [`run_scenario`] at carbon price `c_ghg`.
pub fn run_scenario_at(
    source: &MeritOrderSource,
    gen: &GenerationSeries,
    c_ghg: f64,
) -> Result<ScenarioOutput> {
    let merit_order = source.build_at(c_ghg)?;
    let cef = compute_cef_series(&merit_order, gen, &source.config.with_carbon_price(c_ghg))?;
    Ok(ScenarioOutput { merit_order, cef })
}
