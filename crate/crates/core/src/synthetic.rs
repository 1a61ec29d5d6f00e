//! Deterministic synthetic systems for examples, tests and demos.
//!
//! Loads and renewable feed-in are smooth sinusoids, and conventional
//! generation is obtained by dispatching the system's own merit order, so
//! the generated data is internally consistent. Nothing here is random.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};

use crate::dispatch::utilization;
use crate::error::{Error, Result};
use crate::fmt::exact;
use crate::fuel::FuelType;
use crate::ingest::{
    write_installed_capacity, write_plant_list, FuelParams, GenerationSeries, InstalledCapacity,
    PowerPlant,
};
use crate::merit_order::{build_merit_order_pp, MeritOrder};

/// Fuel prices and emission factors used by the synthetic systems, 2019
/// reference values.
pub fn reference_params() -> FuelParams {
    FuelParams::new()
        .with(FuelType::Oil, 0.28, 54.31)
        .with(FuelType::Gas, 0.25, 26.10)
        .with(FuelType::Coal, 0.34, 14.58)
        .with(FuelType::Lignite, 0.36, 6.18)
        .with(FuelType::Nuclear, 0.0, 4.18)
}

/// Raw generation column label of a fuel, transparency-platform style.
pub fn raw_label(fuel: FuelType) -> &'static str {
    match fuel {
        FuelType::Biomass => "Biomass",
        FuelType::Lignite => "Fossil Brown coal/Lignite",
        FuelType::CoalGas => "Fossil Coal-derived gas",
        FuelType::Gas | FuelType::GasCc => "Fossil Gas",
        FuelType::Coal => "Fossil Hard coal",
        FuelType::Oil => "Fossil Oil",
        FuelType::OilShale => "Fossil Oil shale",
        FuelType::Peat => "Fossil Peat",
        FuelType::Geothermal => "Geothermal",
        FuelType::PumpedHydro => "Hydro Pumped Storage",
        FuelType::Hydro => "Hydro Run-of-river and poundage",
        FuelType::HydroReservoir => "Hydro Water Reservoir",
        FuelType::Marine => "Marine",
        FuelType::Nuclear => "Nuclear",
        FuelType::OtherConv => "Other",
        FuelType::OtherRes => "Other renewable",
        FuelType::Solar => "Solar",
        FuelType::Waste => "Waste",
        FuelType::WindOffshore => "Wind Offshore",
        FuelType::WindOnshore => "Wind Onshore",
    }
}

/// Output of every merit-order fuel when the stack is filled up to `resid`.
/// Gas and combined-cycle gas are reported together as gas.
pub fn dispatch_by_fuel(mo: &MeritOrder, resid: f64) -> Result<BTreeMap<FuelType, f64>> {
    let u = utilization(mo, resid)?;
    let mut out = BTreeMap::new();
    for (b, g) in mo.blocks.iter().zip(&u.gamma) {
        let fuel = if b.fuel == FuelType::GasCc {
            FuelType::Gas
        } else {
            b.fuel
        };
        *out.entry(fuel).or_insert(0.0) += g * b.capacity_mw;
    }
    Ok(out)
}

/// All hours of a calendar year.
pub fn year_index(year: i32) -> Vec<NaiveDateTime> {
    let start = NaiveDate::from_ymd_opt(year, 1, 1)
        .expect("valid year")
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let end = NaiveDate::from_ymd_opt(year + 1, 1, 1)
        .expect("valid year")
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let hours = (end - start).num_hours();
    (0..hours).map(|h| start + Duration::hours(h)).collect()
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// A country-year with a fixed plant fleet and sinusoidal load and
/// renewable profiles.
#[derive(Debug, Clone)]
pub struct SyntheticSystem {
    pub country: String,
    pub year: i32,
    pub plants: Vec<PowerPlant>,
    pub params: FuelParams,
    /// Carbon price used to dispatch the fleet when generating data, EUR/t.
    pub c_ghg: f64,
    /// Multiplies all capacities and profiles.
    pub scale: f64,
    /// Shifts the daily and weather cycles, in hours.
    pub phase_hours: f64,
}

impl SyntheticSystem {
    /// The default fleet for `country`. Different countries get different
    /// scales and phases, derived from the country code.
    pub fn new(country: &str, year: i32) -> Self {
        let code: u32 = country.bytes().map(u32::from).sum();
        let scale = 0.5 + (code % 7) as f64 / 6.0;
        let phase_hours = (code % 5) as f64;
        let mut plants = Vec::new();
        let mut add = |fuel: FuelType, n: usize, cap: f64, eta_lo: f64, eta_hi: f64| {
            for i in 0..n {
                let eta = if n == 1 {
                    eta_lo
                } else {
                    eta_lo + (eta_hi - eta_lo) * i as f64 / (n - 1) as f64
                };
                let mut p = PowerPlant::new(
                    format!("{country}-{fuel}-{i:02}"),
                    fuel,
                    round2(cap * scale),
                    (eta * 1000.0).round() / 1000.0,
                );
                p.country = country.to_string();
                p.commissioned = 1980 + (i as i32 * 3) % 30;
                plants.push(p);
            }
        };
        add(FuelType::Nuclear, 2, 1200.0, 0.33, 0.33);
        add(FuelType::Lignite, 4, 800.0, 0.35, 0.43);
        add(FuelType::Coal, 5, 500.0, 0.36, 0.46);
        add(FuelType::GasCc, 6, 400.0, 0.50, 0.60);
        add(FuelType::Gas, 8, 100.0, 0.30, 0.40);
        add(FuelType::Oil, 3, 80.0, 0.30, 0.38);
        SyntheticSystem {
            country: country.to_string(),
            year,
            plants,
            params: reference_params(),
            c_ghg: 24.9,
            scale,
            phase_hours,
        }
    }

    pub fn merit_order(&self) -> Result<MeritOrder> {
        build_merit_order_pp(&self.plants, &self.params, self.c_ghg)
    }

    /// Installed capacity per fuel as a capacity statistic would report it,
    /// with all gas plants under gas.
    pub fn installed_capacity(&self) -> BTreeMap<FuelType, f64> {
        let mut caps = BTreeMap::new();
        for p in &self.plants {
            let fuel = if p.fuel == FuelType::GasCc {
                FuelType::Gas
            } else {
                p.fuel
            };
            *caps.entry(fuel).or_insert(0.0) += p.capacity_mw;
        }
        for v in caps.values_mut() {
            *v = round2(*v);
        }
        caps
    }

    /// Hourly load and renewable profile at hour `t` of the year:
    /// `(load, solar, wind, hydro, biomass, waste)` in MW.
    fn profile(&self, t: usize, day_of_year: u32) -> [f64; 6] {
        let s = self.scale;
        let th = t as f64 + self.phase_hours;
        let h = th % 24.0;
        let d = day_of_year as f64;
        let season = (2.0 * PI * (d - 15.0) / 365.0).cos();
        let load = s * (8200.0 + 1400.0 * (2.0 * PI * (h - 9.0) / 24.0).sin() + 900.0 * season);
        let daylight = (PI * (h - 6.0) / 12.0).sin().max(0.0);
        let solar = s * 2600.0 * daylight * (0.6 - 0.4 * season);
        let wind = s
            * (1900.0
                + 1300.0 * (2.0 * PI * th / (24.0 * 3.7)).sin()
                + 450.0 * (2.0 * PI * th / 17.0).sin()
                + 500.0 * season)
                .max(0.0);
        [load, solar, wind, s * 600.0, s * 800.0, s * 250.0]
    }

    /// Filled hourly generation for the whole year.
    pub fn generation(&self) -> Result<GenerationSeries> {
        let mo = self.merit_order()?;
        let index = year_index(self.year);
        let n = index.len();
        let cap = 0.98 * mo.total_capacity_mw;
        let mut cols: BTreeMap<FuelType, Vec<f64>> = BTreeMap::new();
        for (t, ts) in index.iter().enumerate() {
            let [load, solar, wind, hydro, biomass, waste] = self.profile(t, ts.ordinal());
            let resid = (load - solar - wind - hydro - biomass - waste).clamp(0.0, cap);
            let mut row = dispatch_by_fuel(&mo, resid)?;
            row.insert(FuelType::Solar, solar);
            row.insert(FuelType::WindOnshore, wind);
            row.insert(FuelType::Hydro, hydro);
            row.insert(FuelType::Biomass, biomass);
            row.insert(FuelType::Waste, waste);
            for (fuel, v) in row {
                cols.entry(fuel).or_insert_with(|| vec![0.0; n])[t] = round2(v);
            }
        }
        let mut series = GenerationSeries::new(self.country.clone(), self.year, index);
        for (fuel, values) in cols {
            series = series.with_column(fuel, values);
        }
        Ok(series)
    }
}

/// Tweaks applied to the raw files written by [`write_raw_dataset`].
#[derive(Debug, Clone, Default)]
pub struct RawOptions {
    /// Write four quarter-hour rows per hour instead of one hourly row.
    pub quarter_hourly: bool,
    /// `(country, hour of year, fuel)` cells left empty.
    pub gaps: Vec<(String, usize, FuelType)>,
    /// `(country, hour of year, fuel, value)` cells overwritten.
    pub spikes: Vec<(String, usize, FuelType, f64)>,
}

/// Write a raw input directory for `systems`:
///
/// - `generation/<CC>_<YEAR>.csv`, transparency-platform column labels,
/// - `plants.csv`, the plant list of all systems,
/// - `installed_capacity_<YEAR>.csv`, one per year,
/// - `fuel_params.csv`.
pub fn write_raw_dataset(dir: &Path, systems: &[SyntheticSystem], opts: &RawOptions) -> Result<()> {
    let gen_dir = dir.join("generation");
    fs::create_dir_all(&gen_dir).map_err(|e| Error::io(&gen_dir, e))?;
    let create = |p: &Path| fs::File::create(p).map_err(|e| Error::io(p, e));

    let mut plants = Vec::new();
    let mut capacity: BTreeMap<i32, InstalledCapacity> = BTreeMap::new();
    for sys in systems {
        let series = sys.generation()?;
        let path = gen_dir.join(format!("{}_{}.csv", sys.country, sys.year));
        let mut f = std::io::BufWriter::new(create(&path)?);
        let fuels: Vec<FuelType> = series.fuels().collect();
        let mut header = vec!["timestamp".to_string()];
        header.extend(fuels.iter().map(|f| raw_label(*f).to_string()));
        let mut wtr = csv::Writer::from_writer(&mut f);
        wtr.write_record(&header)?;
        let steps: &[i64] = if opts.quarter_hourly {
            &[0, 15, 30, 45]
        } else {
            &[0]
        };
        for (t, ts) in series.index.iter().enumerate() {
            for &m in steps {
                let mut rec = vec![(*ts + Duration::minutes(m))
                    .format("%Y-%m-%d %H:%M:%S")
                    .to_string()];
                for fuel in &fuels {
                    let gap = opts
                        .gaps
                        .iter()
                        .any(|(c, h, f)| *c == sys.country && *h == t && f == fuel);
                    let spike = opts
                        .spikes
                        .iter()
                        .find(|(c, h, f, _)| *c == sys.country && *h == t && f == fuel)
                        .map(|s| s.3);
                    rec.push(if gap {
                        String::new()
                    } else {
                        exact(spike.unwrap_or_else(|| series.value(*fuel, t).unwrap_or(0.0)))
                    });
                }
                wtr.write_record(&rec)?;
            }
        }
        wtr.flush().map_err(|e| Error::io(&path, e))?;
        drop(wtr);
        f.flush().map_err(|e| Error::io(&path, e))?;

        plants.extend(sys.plants.iter().cloned());
        capacity
            .entry(sys.year)
            .or_insert_with(|| InstalledCapacity {
                year: sys.year,
                by_country: BTreeMap::new(),
                warnings: Vec::new(),
            })
            .by_country
            .insert(sys.country.clone(), sys.installed_capacity());
    }

    let path = dir.join("plants.csv");
    write_plant_list(&plants, create(&path)?)?;
    for (year, caps) in &capacity {
        let path = dir.join(format!("installed_capacity_{year}.csv"));
        write_installed_capacity(caps, create(&path)?)?;
    }
    let path = dir.join("fuel_params.csv");
    let mut f = create(&path)?;
    writeln!(f, "year,country,fuel,emission_t_per_mwh,price_eur_per_mwh")
        .map_err(|e| Error::io(&path, e))?;
    for (fuel, p) in reference_params().iter() {
        writeln!(
            f,
            ",,{fuel},{},{}",
            exact(p.emission_t_per_mwh),
            exact(p.price_eur_per_mwh)
        )
        .map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// A small system exhibiting the merit-order emission dilemma: cheap but
/// dirty lignite sits below cleaner but pricier combined-cycle gas, with
/// nuclear at the bottom. Residual load peaks at 13:00 (gas marginal) and
/// bottoms out at 01:00 (lignite marginal); wind adds a constant 500 MW.
///
/// Returns the plants, parameters and `days` days of generation starting
/// 1 March 2019.
pub fn dilemma_system(days: usize) -> Result<(Vec<PowerPlant>, FuelParams, GenerationSeries)> {
    let plants = vec![
        PowerPlant::new("nuclear", FuelType::Nuclear, 1000.0, 0.33),
        PowerPlant::new("lignite", FuelType::Lignite, 1000.0, 0.4),
        PowerPlant::new("ccgt", FuelType::GasCc, 1000.0, 0.6),
    ];
    let params = reference_params();
    let mo = build_merit_order_pp(&plants, &params, 0.0)?;
    let t0 = NaiveDate::from_ymd_opt(2019, 3, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let index: Vec<_> = (0..24 * days as i64)
        .map(|h| t0 + Duration::hours(h))
        .collect();
    let mut cols: BTreeMap<FuelType, Vec<f64>> = BTreeMap::new();
    for t in 0..index.len() {
        let h = (t % 24) as f64;
        let resid = 2000.0 + 500.0 * (2.0 * PI * (h - 13.0) / 24.0).cos();
        let mut row = dispatch_by_fuel(&mo, resid)?;
        row.insert(FuelType::WindOnshore, 500.0);
        for (fuel, v) in row {
            cols.entry(fuel).or_insert_with(|| vec![0.0; index.len()])[t] = v;
        }
    }
    let mut series = GenerationSeries::new("XX", 2019, index);
    for (fuel, values) in cols {
        series = series.with_column(fuel, values);
    }
    Ok((plants, params, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::residual_load;

    #[test]
    fn full_year_lengths() {
        assert_eq!(year_index(2019).len(), 8760);
        assert_eq!(year_index(2020).len(), 8784);
    }

    #[test]
    fn generation_is_complete_and_repeatable() {
        let sys = SyntheticSystem::new("DE", 2019);
        let a = sys.generation().unwrap();
        let b = sys.generation().unwrap();
        assert_eq!(a.columns, b.columns);
        assert!(a.is_complete());
        assert_eq!(a.len(), 8760);
        let mo = sys.merit_order().unwrap();
        let rl = residual_load(&a);
        assert!(rl.residual_mw.iter().all(|r| *r <= mo.total_capacity_mw));
        assert!(rl.residual_mw.iter().any(|r| *r > 0.0));
    }

    #[test]
    fn countries_differ() {
        let de = SyntheticSystem::new("DE", 2019);
        let fr = SyntheticSystem::new("FR", 2019);
        assert_ne!(de.installed_capacity(), fr.installed_capacity());
    }

    #[test]
    fn dispatch_conserves_energy() {
        let mo = SyntheticSystem::new("DE", 2019).merit_order().unwrap();
        let out = dispatch_by_fuel(&mo, 5432.1).unwrap();
        assert!((out.values().sum::<f64>() - 5432.1).abs() < 1e-9);
    }

    #[test]
    fn dilemma_margins() {
        let (_, _, gen) = dilemma_system(2).unwrap();
        let rl = residual_load(&gen);
        assert_eq!(rl.residual_mw[13], 2500.0);
        assert_eq!(rl.residual_mw[1], 1500.0);
        assert_eq!(gen.len(), 48);
    }
}
