//! Applying a merit order to the hourly residual load: marginal block,
//! marginal price, marginal emission factor (MEF) and grid-mix emission
//! factor (XEF).

use std::io::{Read, Write};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::fmt::{sig6, sig6_opt};
use crate::fuel::{FuelClass, FuelType};
use crate::ingest::{format_timestamp, parse_timestamp, GenerationSeries};
use crate::merit_order::{MeritOrder, Method};

/// Hourly residual load and generation shares.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualLoad {
    /// Sum of merit-order fuel generation, MW.
    pub residual_mw: Vec<f64>,
    /// Total generation over all fuels, MW.
    pub total_mw: Vec<f64>,
    /// Conventional share of total generation (0 when total is 0).
    pub conv_share: Vec<f64>,
    /// Renewable share of total generation (0 when total is 0).
    pub res_share: Vec<f64>,
}

impl ResidualLoad {
    /// Mean renewable share over hours with positive total generation.
    pub fn mean_res_share(&self) -> f64 {
        let (sum, n) = self
            .res_share
            .iter()
            .zip(&self.total_mw)
            .filter(|(_, t)| **t > 0.0)
            .fold((0.0, 0usize), |(s, n), (r, _)| (s + r, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Residual load as the sum of conventional generation of merit-order fuels.
/// Missing values count as zero; callers are expected to pass a filled series.
pub fn residual_load(series: &GenerationSeries) -> ResidualLoad {
    let n = series.len();
    let mut out = ResidualLoad {
        residual_mw: vec![0.0; n],
        total_mw: vec![0.0; n],
        conv_share: vec![0.0; n],
        res_share: vec![0.0; n],
    };
    for t in 0..n {
        let mut resid = 0.0;
        for (fuel, column) in &series.columns {
            if fuel.is_merit_order_fuel() {
                resid += column[t].unwrap_or(0.0);
            }
        }
        let total = series.total_at(t);
        out.residual_mw[t] = resid;
        out.total_mw[t] = total;
        if total > 0.0 {
            out.conv_share[t] = series.class_total_at(t, FuelClass::Conv) / total;
            out.res_share[t] = series.class_total_at(t, FuelClass::Res) / total;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarginalBlock {
    pub index: usize,
    /// Residual load exceeded the total merit-order capacity.
    pub saturated: bool,
}

fn check_resid(resid: f64) -> Result<()> {
    if !(resid >= 0.0) || !resid.is_finite() {
        return Err(Error::InvalidInput(format!(
            "residual load must be finite and non-negative, got {resid}"
        )));
    }
    Ok(())
}

/// The block `p` with `start_p < resid <= end_p`. Zero residual load maps
/// to the first block; load beyond the total capacity maps to the last
/// block and is flagged as saturated.
pub fn marginal_block(mo: &MeritOrder, resid: f64) -> Result<MarginalBlock> {
    if mo.is_empty() {
        return Err(Error::EmptyMeritOrder);
    }
    check_resid(resid)?;
    Ok(MarginalBlock {
        index: mo.block_at(resid),
        saturated: resid > mo.total_capacity_mw,
    })
}

/// Marginal emission factor: intensity of the marginal block over the
/// transmission efficiency.
pub fn mef_at(mo: &MeritOrder, resid: f64, eta_t: f64) -> Result<f64> {
    let m = marginal_block(mo, resid)?;
    Ok(mo.blocks[m.index].emission_intensity / eta_t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utilization {
    pub gamma: Vec<f64>,
    pub saturated: bool,
}

/// Capacity utilization per block: 1 for blocks fully below the residual
/// load, 0 for blocks above it, the covered fraction for the straddled one.
pub fn utilization(mo: &MeritOrder, resid: f64) -> Result<Utilization> {
    check_resid(resid)?;
    let gamma = mo
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let start = mo.start_of(i);
            if b.cum_capacity_mw < resid {
                1.0
            } else if start >= resid {
                0.0
            } else {
                (resid - start) / b.capacity_mw
            }
        })
        .collect();
    Ok(Utilization {
        gamma,
        saturated: resid > mo.total_capacity_mw,
    })
}

/// Dispatched power per block, MW: full capacity below the residual load,
/// the uncovered remainder for the straddled block, zero above it.
pub fn block_output(mo: &MeritOrder, resid: f64) -> Result<Vec<f64>> {
    check_resid(resid)?;
    Ok(mo
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if b.cum_capacity_mw < resid {
                b.capacity_mw
            } else {
                (resid - mo.start_of(i)).max(0.0)
            }
        })
        .collect())
}

/// Grid-mix emission factor: dispatched emissions over the transmission
/// efficiency times total generated energy in the step.
pub fn xef_at(
    mo: &MeritOrder,
    resid: f64,
    total_generation_mwh: f64,
    eta_t: f64,
    dt_hours: f64,
) -> Result<f64> {
    if !(total_generation_mwh > 0.0) {
        return Err(Error::InvalidInput("zero total generation".into()));
    }
    // weight each intensity by its share of total energy, so a single block
    // covering all generation returns its intensity unchanged
    let intensity: f64 = mo
        .blocks
        .iter()
        .zip(block_output(mo, resid)?)
        .map(|(b, p)| b.emission_intensity * (p * dt_hours / total_generation_mwh))
        .sum();
    Ok(intensity / eta_t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CefHour {
    pub residual_load_mw: f64,
    pub marginal_fuel: FuelType,
    /// Marginal cost of the marginal block, EUR/MWh_el.
    pub marginal_cost: f64,
    /// t CO2eq/MWh_el
    pub mef: f64,
    /// t CO2eq/MWh_el; `None` when total generation was zero.
    pub xef: Option<f64>,
    pub saturated: bool,
}

/// Hourly marginal price, MEF and XEF of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct CefSeries {
    pub country: String,
    pub year: i32,
    pub method: Method,
    pub c_ghg: f64,
    pub index: Vec<NaiveDateTime>,
    pub hours: Vec<CefHour>,
    pub warnings: Vec<String>,
}

impl CefSeries {
    pub fn len(&self) -> usize {
        self.hours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hours.is_empty()
    }

    pub fn prices(&self) -> Vec<f64> {
        self.hours.iter().map(|h| h.marginal_cost).collect()
    }

    pub fn mefs(&self) -> Vec<f64> {
        self.hours.iter().map(|h| h.mef).collect()
    }

    pub fn xefs(&self) -> Vec<Option<f64>> {
        self.hours.iter().map(|h| h.xef).collect()
    }

    pub fn saturated_hours(&self) -> usize {
        self.hours.iter().filter(|h| h.saturated).count()
    }

    pub fn invalid_hours(&self) -> usize {
        self.hours.iter().filter(|h| h.xef.is_none()).count()
    }

    /// Write the published series format: `timestamp, residual_load_mw,
    /// marginal_fuel, marginal_cost_eur_mwh, mef_t_per_mwh, xef_t_per_mwh,
    /// saturated_flag`. An invalid XEF is written as an empty cell.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record([
            "timestamp",
            "residual_load_mw",
            "marginal_fuel",
            "marginal_cost_eur_mwh",
            "mef_t_per_mwh",
            "xef_t_per_mwh",
            "saturated_flag",
        ])?;
        for (ts, h) in self.index.iter().zip(&self.hours) {
            wtr.write_record([
                format_timestamp(*ts),
                sig6(h.residual_load_mw),
                h.marginal_fuel.to_string(),
                sig6(h.marginal_cost),
                sig6(h.mef),
                sig6_opt(h.xef),
                u8::from(h.saturated).to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<cef series>", e))?;
        Ok(())
    }

    /// Read a series written by [`CefSeries::write_csv`].
    pub fn read_csv<R: Read>(
        source: R,
        country: &str,
        year: i32,
        method: Method,
        c_ghg: f64,
    ) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(source);
        let mut index = Vec::new();
        let mut hours = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let f = |i: usize| row.get(i).unwrap_or("");
            let num = |i: usize| {
                f(i).parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{}' in series", f(i))))
            };
            index.push(parse_timestamp(f(0))?);
            hours.push(CefHour {
                residual_load_mw: num(1)?,
                marginal_fuel: f(2).parse()?,
                marginal_cost: num(3)?,
                mef: num(4)?,
                xef: if f(5).is_empty() { None } else { Some(num(5)?) },
                saturated: f(6) == "1",
            });
        }
        Ok(CefSeries {
            country: country.to_string(),
            year,
            method,
            c_ghg,
            index,
            hours,
            warnings: Vec::new(),
        })
    }
}

/// Dispatch the merit order against every hour of a filled generation
/// series. Hours with zero total generation get an invalid XEF; hours beyond
/// the merit-order capacity are flagged as saturated. Neither aborts the
/// computation.
pub fn compute_cef_series(
    mo: &MeritOrder,
    gen: &GenerationSeries,
    config: &ScenarioConfig,
) -> Result<CefSeries> {
    if gen.country != config.country || gen.year != config.year {
        return Err(Error::InvalidInput(format!(
            "generation series ({}, {}) does not match scenario ({}, {})",
            gen.country, gen.year, config.country, config.year
        )));
    }
    if !gen.is_complete() {
        return Err(Error::Data(format!(
            "generation series ({}, {}) has {} missing values; fill it first",
            gen.country,
            gen.year,
            gen.missing_count()
        )));
    }
    let rl = residual_load(gen);
    let mut hours = Vec::with_capacity(gen.len());
    for t in 0..gen.len() {
        let resid = rl.residual_mw[t];
        let m = marginal_block(mo, resid)?;
        let block = &mo.blocks[m.index];
        let xef = xef_at(
            mo,
            resid,
            rl.total_mw[t] * config.dt_hours,
            config.eta_t,
            config.dt_hours,
        )
        .ok();
        hours.push(CefHour {
            residual_load_mw: resid,
            marginal_fuel: block.fuel,
            marginal_cost: block.marginal_cost,
            mef: block.emission_intensity / config.eta_t,
            xef,
            saturated: m.saturated,
        });
    }

    let mut warnings = Vec::new();
    let left_out: Vec<String> = gen
        .fuels()
        .filter(|f| f.is_conv() && !f.is_merit_order_fuel())
        .filter(|f| gen.columns[f].iter().any(|v| v.unwrap_or(0.0) > 0.0))
        .map(|f| f.to_string())
        .collect();
    if !left_out.is_empty() {
        warnings.push(format!(
            "conventional generation without cost data left out of the residual load: {}",
            left_out.join(", ")
        ));
    }
    let series = CefSeries {
        country: config.country.clone(),
        year: config.year,
        method: config.method,
        c_ghg: config.c_ghg,
        index: gen.index.clone(),
        hours,
        warnings,
    };
    if series.saturated_hours() > 0 {
        let mut s = series;
        s.warnings.push(format!(
            "{} hours exceed the merit-order capacity",
            s.saturated_hours()
        ));
        return Ok(s);
    }
    Ok(series)
}
