//! Merit-order construction: dispatch blocks sorted by ascending marginal
//! cost, built either from a plant list with known efficiencies (PP) or from
//! installed capacities discretized into equally sized virtual plants on a
//! linear efficiency ramp (PWL, PWLv).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::fuel::FuelType;
use crate::ingest::{FuelParams, PowerPlant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Plant list with per-plant efficiencies.
    Pp,
    /// Virtual plants from national installed capacities.
    Pwl,
    /// Virtual plants from capacities aggregated out of the plant list.
    Pwlv,
}

impl Method {
    pub fn slug(self) -> &'static str {
        match self {
            Method::Pp => "pp",
            Method::Pwl => "pwl",
            Method::Pwlv => "pwlv",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pp => "PP",
            Method::Pwl => "PWL",
            Method::Pwlv => "PWLv",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pp" => Ok(Method::Pp),
            "pwl" => Ok(Method::Pwl),
            "pwlv" => Ok(Method::Pwlv),
            _ => Err(Error::Parse(format!(
                "unknown method '{s}' (pp, pwl, pwlv)"
            ))),
        }
    }
}

/// Emission intensity per unit of electricity: fuel intensity over efficiency.
pub fn plant_emission_intensity(plant: &PowerPlant, params: &FuelParams) -> Result<f64> {
    let p = params.require(plant.fuel)?;
    check_efficiency(plant)?;
    Ok(p.emission_t_per_mwh / plant.efficiency)
}

/// Fuel cost plus carbon cost per unit of electricity, EUR/MWh_el.
pub fn plant_marginal_cost(plant: &PowerPlant, params: &FuelParams, c_ghg: f64) -> Result<f64> {
    let p = params.require(plant.fuel)?;
    check_efficiency(plant)?;
    if !(c_ghg >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "carbon price must be non-negative, got {c_ghg}"
        )));
    }
    let eta = plant.efficiency;
    Ok(p.price_eur_per_mwh / eta + p.emission_t_per_mwh / eta * c_ghg)
}

fn check_efficiency(plant: &PowerPlant) -> Result<()> {
    if !(plant.efficiency > 0.0) {
        return Err(Error::InvalidInput(format!(
            "plant {}: efficiency must be positive, got {}",
            plant.id, plant.efficiency
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchBlock {
    pub id: String,
    pub fuel: FuelType,
    pub capacity_mw: f64,
    pub efficiency: f64,
    /// EUR/MWh_el
    pub marginal_cost: f64,
    /// t CO2eq/MWh_el
    pub emission_intensity: f64,
    /// Cumulative capacity at the right edge of this block.
    pub cum_capacity_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: Method,
    pub c_ghg: f64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeritOrder {
    pub blocks: Vec<DispatchBlock>,
    pub total_capacity_mw: f64,
    pub provenance: Provenance,
    /// Capacity left out because its fuel has no cost or emission data.
    pub excluded: BTreeMap<FuelType, f64>,
}

/// Deterministic block order: marginal cost, then emission intensity, then
/// fuel name, then capacity.
fn block_order(a: &DispatchBlock, b: &DispatchBlock) -> Ordering {
    a.marginal_cost
        .total_cmp(&b.marginal_cost)
        .then(a.emission_intensity.total_cmp(&b.emission_intensity))
        .then_with(|| a.fuel.name().cmp(b.fuel.name()))
        .then(a.capacity_mw.total_cmp(&b.capacity_mw))
}

impl MeritOrder {
    /// Sort plants into a merit order. Plants whose fuel has no parameters
    /// are left out and reported in `excluded`.
    pub fn from_plants(
        plants: &[PowerPlant],
        params: &FuelParams,
        c_ghg: f64,
        method: Method,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(plants.len());
        let mut excluded: BTreeMap<FuelType, f64> = BTreeMap::new();
        for plant in plants {
            if !params.contains(plant.fuel) {
                *excluded.entry(plant.fuel).or_default() += plant.capacity_mw;
                continue;
            }
            plant.validate()?;
            blocks.push(DispatchBlock {
                id: plant.id.clone(),
                fuel: plant.fuel,
                capacity_mw: plant.capacity_mw,
                efficiency: plant.efficiency,
                marginal_cost: plant_marginal_cost(plant, params, c_ghg)?,
                emission_intensity: plant_emission_intensity(plant, params)?,
                cum_capacity_mw: 0.0,
            });
        }
        if blocks.is_empty() {
            return Err(Error::EmptyMeritOrder);
        }
        blocks.sort_by(block_order);
        let mut cum = 0.0;
        for b in &mut blocks {
            cum += b.capacity_mw;
            b.cum_capacity_mw = cum;
        }
        Ok(MeritOrder {
            blocks,
            total_capacity_mw: cum,
            provenance: Provenance {
                method,
                c_ghg,
                config_hash: String::new(),
            },
            excluded,
        })
    }

    pub fn with_config_hash(mut self, hash: impl Into<String>) -> Self {
        self.provenance.config_hash = hash.into();
        self
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Left edge (cumulative capacity before) of block `i`.
    pub fn start_of(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.blocks[i - 1].cum_capacity_mw
        }
    }

    /// Index of the block whose capacity interval `(start, end]` contains
    /// `position`; 0 for `position <= 0`, the last block beyond the total.
    pub fn block_at(&self, position: f64) -> usize {
        let idx = self
            .blocks
            .partition_point(|b| b.cum_capacity_mw < position);
        idx.min(self.blocks.len().saturating_sub(1))
    }

    /// Sample the stack at the centres of equally sized capacity elements
    /// (e.g. 10 MW) and return the block index behind each element. The last
    /// element is truncated at the total capacity.
    pub fn element_blocks(&self, element_mw: f64) -> Vec<usize> {
        assert!(element_mw > 0.0, "element size must be positive");
        let n = (self.total_capacity_mw / element_mw).ceil() as usize;
        (0..n)
            .map(|k| {
                let centre = ((k as f64 + 0.5) * element_mw).min(self.total_capacity_mw);
                self.block_at(centre)
            })
            .collect()
    }

    /// Export as CSV with columns `rank, fuel, capacity_mw, cum_capacity_mw,
    /// efficiency, marginal_cost_eur_mwh, emission_intensity_t_mwh`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record([
            "rank",
            "fuel",
            "capacity_mw",
            "cum_capacity_mw",
            "efficiency",
            "marginal_cost_eur_mwh",
            "emission_intensity_t_mwh",
        ])?;
        for (i, b) in self.blocks.iter().enumerate() {
            wtr.write_record([
                (i + 1).to_string(),
                b.fuel.to_string(),
                sig6(b.capacity_mw),
                sig6(b.cum_capacity_mw),
                sig6(b.efficiency),
                sig6(b.marginal_cost),
                sig6(b.emission_intensity),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<merit order>", e))?;
        Ok(())
    }
}

/// Merit order from a list of active plants.
pub fn build_merit_order_pp(
    plants: &[PowerPlant],
    params: &FuelParams,
    c_ghg: f64,
) -> Result<MeritOrder> {
    MeritOrder::from_plants(plants, params, c_ghg, Method::Pp)
}

/// Split total gas capacity into (combined-cycle, open-cycle) by the
/// combined-cycle share `k_cc`.
pub fn split_gas_capacity(capacity_mw: f64, k_cc: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&k_cc) {
        return Err(Error::InvalidInput(format!(
            "combined-cycle share must be in [0, 1], got {k_cc}"
        )));
    }
    let cc = capacity_mw * k_cc;
    Ok((cc, capacity_mw - cc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBounds {
    pub min: f64,
    pub max: f64,
}

impl EnvelopeBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        let b = EnvelopeBounds { min, max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.min <= self.max && self.max <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "efficiency envelope must satisfy 0 < min <= max <= 1, got ({}, {})",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Efficiency at relative position `x` in [0, 1] of the ramp.
    pub fn at(&self, x: f64) -> f64 {
        self.min + x * (self.max - self.min)
    }
}

/// Per-fuel minimum and maximum electrical efficiency.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEnvelope(pub BTreeMap<FuelType, EnvelopeBounds>);

impl EfficiencyEnvelope {
    pub fn get(&self, fuel: FuelType) -> Option<EnvelopeBounds> {
        self.0.get(&fuel).copied()
    }

    pub fn insert(&mut self, fuel: FuelType, bounds: EnvelopeBounds) {
        self.0.insert(fuel, bounds);
    }

    pub fn from_regression(plants: &[PowerPlant]) -> Self {
        efficiency_envelope_from_regression(plants)
    }
}

/// Ordinary least squares line through `(position, efficiency)` points,
/// evaluated at the smallest and largest position. The fitted bounds are
/// kept inside the observed efficiency range. A single point (or a set of
/// points sharing one position) yields its mean efficiency for both bounds.
pub fn fit_envelope(points: &[(f64, f64)]) -> Option<EnvelopeBounds> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if !(sxx > 0.0) {
        return Some(EnvelopeBounds {
            min: mean_y,
            max: mean_y,
        });
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let lo_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let lo_y = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi_y = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let fit = |x: f64| (mean_y + slope * (x - mean_x)).clamp(lo_y, hi_y);
    let (a, b) = (fit(lo_x), fit(hi_x));
    Some(EnvelopeBounds {
        min: a.min(b),
        max: a.max(b),
    })
}

/// Per-fuel efficiency envelope from a plant list. Within each fuel the
/// plants are ordered by ascending efficiency and placed at the midpoint of
/// their segment on the fuel's cumulative capacity axis; the envelope is the
/// OLS line of efficiency over that position, evaluated at the outermost
/// plants. Fuels with a single plant get that plant's efficiency twice.
pub fn efficiency_envelope_from_regression(plants: &[PowerPlant]) -> EfficiencyEnvelope {
    let mut by_fuel: BTreeMap<FuelType, Vec<&PowerPlant>> = BTreeMap::new();
    for p in plants {
        by_fuel.entry(p.fuel).or_default().push(p);
    }
    let mut env = EfficiencyEnvelope::default();
    for (fuel, mut group) in by_fuel {
        group.sort_by(|a, b| {
            a.efficiency
                .total_cmp(&b.efficiency)
                .then(a.capacity_mw.total_cmp(&b.capacity_mw))
                .then_with(|| a.id.cmp(&b.id))
        });
        let mut cum = 0.0;
        let points: Vec<(f64, f64)> = group
            .iter()
            .map(|p| {
                let mid = cum + p.capacity_mw / 2.0;
                cum += p.capacity_mw;
                (mid, p.efficiency)
            })
            .collect();
        if let Some(bounds) = fit_envelope(&points) {
            env.insert(fuel, bounds);
        }
    }
    env
}

/// Discretize each fuel's capacity `C` into `n = max(1, round(C / s))`
/// equally sized virtual plants, `s` being the fuel's average plant size.
/// Plant `i` sits at the midpoint of its segment on the linear efficiency
/// ramp: `min + (i + 0.5) / n * (max - min)`. Fuels with zero capacity yield
/// no plants.
pub fn discretize_virtual_plants(
    capacities: &BTreeMap<FuelType, f64>,
    avg_sizes: &BTreeMap<FuelType, f64>,
    envelope: &EfficiencyEnvelope,
) -> Result<Vec<PowerPlant>> {
    let mut plants = Vec::new();
    for (&fuel, &capacity) in capacities {
        if !(capacity >= 0.0) || !capacity.is_finite() {
            return Err(Error::InvalidInput(format!(
                "capacity for {fuel} must be non-negative, got {capacity}"
            )));
        }
        if capacity == 0.0 {
            continue;
        }
        let size = *avg_sizes
            .get(&fuel)
            .ok_or_else(|| Error::Config(format!("no average plant size for {fuel}")))?;
        if !(size > 0.0) {
            return Err(Error::InvalidInput(format!(
                "average plant size for {fuel} must be positive, got {size}"
            )));
        }
        let bounds = envelope
            .get(fuel)
            .ok_or_else(|| Error::Config(format!("no efficiency envelope for {fuel}")))?;
        bounds.validate()?;
        let n = ((capacity / size).round() as usize).max(1);
        let unit = capacity / n as f64;
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            plants.push(PowerPlant::new(
                format!("{fuel}-{i:04}"),
                fuel,
                unit,
                bounds.at(x),
            ));
        }
    }
    Ok(plants)
}

/// Aggregate plant capacities per fuel (capacity source of the PWLv method).
pub fn capacities_from_plants(plants: &[PowerPlant]) -> BTreeMap<FuelType, f64> {
    let mut caps = BTreeMap::new();
    for p in plants {
        *caps.entry(p.fuel).or_insert(0.0) += p.capacity_mw;
    }
    caps
}

/// Piecewise-linear merit order from installed capacities per fuel. Fuels
/// without cost data are excluded. Gas is split into gas_cc and gas by the
/// combined-cycle share unless the capacities already list gas_cc.
pub fn build_merit_order_pwl(
    capacities: &BTreeMap<FuelType, f64>,
    config: &ScenarioConfig,
    params: &FuelParams,
) -> Result<MeritOrder> {
    let mut caps: BTreeMap<FuelType, f64> = BTreeMap::new();
    let mut excluded: BTreeMap<FuelType, f64> = BTreeMap::new();
    for (&fuel, &c) in capacities {
        if params.contains(fuel) {
            caps.insert(fuel, c);
        } else if c > 0.0 {
            excluded.insert(fuel, c);
        }
    }
    if !caps.contains_key(&FuelType::GasCc) {
        if let Some(gas) = caps.get(&FuelType::Gas).copied().filter(|g| *g > 0.0) {
            let k_cc = config.k_cc.ok_or_else(|| {
                Error::Config(format!("no combined-cycle share for {}", config.country))
            })?;
            let (cc, oc) = split_gas_capacity(gas, k_cc)?;
            caps.insert(FuelType::GasCc, cc);
            caps.insert(FuelType::Gas, oc);
        }
    }
    if caps.values().all(|c| *c == 0.0) {
        return Err(Error::InvalidInput(format!(
            "all merit-order capacities are zero for {} {}",
            config.country, config.year
        )));
    }
    let plants = discretize_virtual_plants(&caps, &config.avg_plant_size_mw, &config.envelope)?;
    let mut mo = MeritOrder::from_plants(&plants, params, config.c_ghg, config.method)?;
    mo.excluded = excluded;
    Ok(mo.with_config_hash(config.config_hash.clone()))
}
