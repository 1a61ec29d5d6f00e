//! Command-line front end: `ingest`, `compute`, `shift`, `sweep` and
//! `validate` over country-year scenarios.
//!
//! Raw input layout (`ingest --data-dir`):
//!
//! ```text
//! generation/<CC>_<YEAR>.csv        generation per fuel, any sub-hourly resolution
//! installed_capacity_<YEAR>.csv     country x fuel capacity matrix
//! plants.csv                        plant list (optional)
//! fuel_params.csv                   fuel prices and emission factors (optional)
//! carbon_prices.csv                 weekly allowance prices (optional)
//! ```
//!
//! `ingest` writes the normalized layout that the other commands read:
//!
//! ```text
//! generation/<CC>_<YEAR>.csv        hourly, gap-free
//! fill_reports/<CC>_<YEAR>.csv      filled and outlier cells
//! plants/<CC>_<YEAR>.csv            plants active in that country-year
//! installed_capacity_<YEAR>.csv
//! fuel_params.csv, carbon_price.csv
//! ```
//!
//! Every command writes `manifest.json` into its output directory. Exit
//! codes: 0 all scenarios succeeded, 1 some failed, 2 fatal error or
//! nothing succeeded.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{
    carbon_price_sweep, locate_zero_crossing, parse_grid, shift_study_vs_carbon_price,
    validation_errors, write_shift_sweep_csv, write_sweep_csv, write_validation_csv, SweepPoint,
    ValidationReport, Weighting,
};
use crate::config::{Config, CONFIG_ENV};
use crate::error::{Error, Result};
use crate::fmt::{exact, sig6};
use crate::fuel::FuelType;
use crate::ingest::{
    annual_carbon_price, detect_outliers_zscore, fill_missing, load_installed_capacity,
    load_plant_list, load_weekly_prices, parse_generation_csv, resample_hourly, write_fill_report,
    write_generation_csv, write_installed_capacity, write_plant_list, FuelParamTable, FuelParams,
    GenerationSchema, GenerationSeries, InstalledCapacity, PowerPlant,
};
use crate::loadshift::{run_shift_study_with, Driver};
use crate::merit_order::Method;
use crate::scenario::{run_scenario, MeritOrderSource};

#[derive(Debug, Parser)]
#[command(
    name = "cefsim",
    version,
    about = "Merit-order carbon emission factors and load-shift studies"
)]
pub struct Cli {
    /// Configuration file (TOML); the bundled defaults are used otherwise.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Input directory: raw data for `ingest`, normalized data otherwise.
    #[arg(long, global = true, default_value = "data")]
    pub data_dir: PathBuf,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// Worker threads; 0 uses all cores. Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize raw generation, capacity, plant and price files.
    Ingest(IngestArgs),
    /// Hourly marginal prices, MEFs and XEFs per scenario.
    Compute(ComputeArgs),
    /// Daily load-shift study.
    Shift(ShiftArgs),
    /// Carbon-price sensitivity of the merit order (and optionally of a shift study).
    Sweep(SweepArgs),
    /// Errors of the PWLv method against the PP method.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct Selector {
    /// Countries to process (comma separated); all found by default.
    #[arg(long, value_delimiter = ',')]
    pub country: Vec<String>,

    /// Years to process (comma separated); all found by default.
    #[arg(long, value_delimiter = ',')]
    pub year: Vec<i32>,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub select: Selector,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub select: Selector,

    /// Merit-order methods: pp, pwl, pwlv (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "pwl")]
    pub method: Vec<Method>,

    /// Carbon price in EUR/t, overriding data and configuration.
    #[arg(long)]
    pub carbon_price: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ShiftArgs {
    #[command(flatten)]
    pub select: Selector,

    #[arg(long, value_delimiter = ',', default_value = "pwl")]
    pub method: Vec<Method>,

    /// Incentive signals: price, xef, mef (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "price")]
    pub driver: Vec<Driver>,

    #[arg(long)]
    pub carbon_price: Option<f64>,

    /// Energy shifted per day, kWh.
    #[arg(long, default_value_t = 1.0)]
    pub shift_kwh: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub select: Selector,

    #[arg(long, value_delimiter = ',', default_value = "pp")]
    pub method: Vec<Method>,

    /// Carbon price grid `start:stop:step` in EUR/t, stop included.
    #[arg(long, default_value = "0:300:5")]
    pub cghg_grid: String,

    /// Also run a shift study under this driver at every grid point.
    #[arg(long)]
    pub driver: Option<Driver>,

    /// Weight every block equally instead of per 10 MW of capacity.
    #[arg(long)]
    pub per_block: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub select: Selector,

    #[arg(long)]
    pub carbon_price: Option<f64>,
}

/// Record of one run, written as `manifest.json`.
#[derive(Debug, Clone, Serialize, Default)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub scenarios: Vec<ScenarioRecord>,
    /// Input files (relative to the data directory) and their SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output files (relative to the output directory) and their SHA-256.
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ScenarioRecord {
    pub id: String,
    pub country: String,
    pub year: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fill_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturated_hours: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid_hours: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_days: Option<usize>,
}

/// Result of a command: the manifest and whether a fatal error occurred.
#[derive(Debug)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub exit_code: i32,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn rel(base: &Path, path: &Path) -> String {
    path.strip_prefix(base)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}

fn create_file(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn open_file(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Write `path` with `f` and return its location relative to `base`.
fn write_output<F>(base: &Path, name: &str, f: F) -> Result<String>
where
    F: FnOnce(&mut std::io::BufWriter<fs::File>) -> Result<()>,
{
    let path = base.join(name);
    let mut w = std::io::BufWriter::new(create_file(&path)?);
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(name.to_string())
}

/// `<CC>_<YEAR>.csv` files of a generation directory.
fn discover(dir: &Path) -> Result<Vec<(String, i32)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(stem) = name.strip_suffix(".csv") else {
            continue;
        };
        let Some((cc, year)) = stem.rsplit_once('_') else {
            continue;
        };
        if let Ok(y) = year.parse::<i32>() {
            found.push((cc.to_string(), y));
        }
    }
    found.sort();
    Ok(found)
}

fn select(dir: &Path, sel: &Selector) -> Result<Vec<(String, i32)>> {
    let found = discover(dir)?;
    if !sel.country.is_empty() && !sel.year.is_empty() {
        for c in &sel.country {
            for y in &sel.year {
                if !found.iter().any(|(fc, fy)| fc == c && fy == y) {
                    return Err(Error::Missing(format!(
                        "generation data for ({c}, {y}) in {}",
                        dir.display()
                    )));
                }
            }
        }
    }
    let out: Vec<_> = found
        .into_iter()
        .filter(|(c, y)| {
            (sel.country.is_empty() || sel.country.contains(c))
                && (sel.year.is_empty() || sel.year.contains(y))
        })
        .collect();
    if out.is_empty() {
        return Err(Error::Missing(format!(
            "no matching scenarios in {}",
            dir.display()
        )));
    }
    Ok(out)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))
}

/// Per-scenario work result: the record and the input files it read.
type Work = (ScenarioRecord, BTreeSet<PathBuf>);

fn failed(mut rec: ScenarioRecord, err: &Error) -> ScenarioRecord {
    rec.status = "failed".into();
    rec.error = Some(err.to_string());
    rec.outputs.clear();
    rec
}

fn record(country: &str, year: i32, method: Option<Method>, suffix: &str) -> ScenarioRecord {
    let mut id = format!("{country}_{year}");
    if let Some(m) = method {
        id.push('_');
        id.push_str(m.slug());
    }
    id.push_str(suffix);
    ScenarioRecord {
        id,
        country: country.to_string(),
        year,
        method: method.map(|m| m.to_string()),
        status: "ok".into(),
        ..Default::default()
    }
}

fn finish(
    command: &str,
    config: &Config,
    data_dir: &Path,
    out_dir: &Path,
    works: Vec<Work>,
) -> Result<Outcome> {
    let mut manifest = RunManifest {
        command: command.into(),
        config_hash: config.hash(),
        ..Default::default()
    };
    let mut inputs = BTreeSet::new();
    for (rec, read) in works {
        inputs.extend(read);
        manifest.scenarios.push(rec);
    }
    manifest.scenarios.sort_by(|a, b| a.id.cmp(&b.id));
    for path in inputs {
        manifest
            .inputs
            .insert(rel(data_dir, &path), sha256_file(&path)?);
    }
    for rec in &manifest.scenarios {
        for o in &rec.outputs {
            manifest
                .outputs
                .insert(o.clone(), sha256_file(&out_dir.join(o))?);
        }
    }
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = out_dir.join("manifest.json");
    let mut f = create_file(&path)?;
    f.write_all(json.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|e| Error::io(&path, e))?;

    let ok = manifest
        .scenarios
        .iter()
        .filter(|s| s.status == "ok")
        .count();
    let n = manifest.scenarios.len();
    for s in &manifest.scenarios {
        match &s.error {
            Some(e) => eprintln!("{}: failed: {e}", s.id),
            None => eprintln!("{}: ok", s.id),
        }
        for w in &s.warnings {
            eprintln!("{}: warning: {w}", s.id);
        }
    }
    let exit_code = if ok == n {
        0
    } else if ok == 0 {
        2
    } else {
        1
    };
    Ok(Outcome {
        manifest,
        exit_code,
    })
}

/// Shared read access to a normalized data directory.
struct Workspace<'a> {
    config: &'a Config,
    dir: &'a Path,
}

impl Workspace<'_> {
    fn generation(
        &self,
        country: &str,
        year: i32,
        read: &mut BTreeSet<PathBuf>,
    ) -> Result<GenerationSeries> {
        let path = self
            .dir
            .join("generation")
            .join(format!("{country}_{year}.csv"));
        let schema = GenerationSchema {
            timestamp_column: None,
            names: self.config.fuel_names(),
        };
        let series = parse_generation_csv(open_file(&path)?, &schema, country, year)?;
        read.insert(path);
        if !series.is_complete() {
            return Err(Error::Data(format!(
                "generation for ({country}, {year}) has gaps; run ingest first"
            )));
        }
        Ok(series)
    }

    fn params(&self, country: &str, year: i32, read: &mut BTreeSet<PathBuf>) -> Result<FuelParams> {
        let path = self.dir.join("fuel_params.csv");
        let table = if path.exists() {
            read.insert(path.clone());
            FuelParamTable::from_csv(open_file(&path)?, &self.config.fuel_names())?
        } else {
            self.config.fuel_param_table()
        };
        let params = table.resolve(year, country);
        if params.iter().next().is_none() {
            return Err(Error::Missing(format!(
                "fuel parameters for ({country}, {year})"
            )));
        }
        Ok(params)
    }

    fn carbon_price(
        &self,
        year: i32,
        explicit: Option<f64>,
        read: &mut BTreeSet<PathBuf>,
    ) -> Result<f64> {
        if let Some(c) = explicit {
            return Ok(c);
        }
        let path = self.dir.join("carbon_price.csv");
        if path.exists() {
            let mut rdr = csv::Reader::from_reader(open_file(&path)?);
            for row in rdr.records() {
                let row = row?;
                if row.get(0).and_then(|y| y.parse::<i32>().ok()) == Some(year) {
                    read.insert(path.clone());
                    return row
                        .get(1)
                        .and_then(|p| p.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad carbon price for {year}")));
                }
            }
        }
        self.config
            .carbon_price(year)
            .ok_or_else(|| Error::Missing(format!("carbon price for {year}; pass --carbon-price")))
    }

    fn plants(
        &self,
        country: &str,
        year: i32,
        read: &mut BTreeSet<PathBuf>,
    ) -> Result<Option<Vec<PowerPlant>>> {
        let path = self
            .dir
            .join("plants")
            .join(format!("{country}_{year}.csv"));
        if !path.exists() {
            return Ok(None);
        }
        read.insert(path.clone());
        let list = load_plant_list(
            open_file(&path)?,
            &self.config.fuel_names(),
            Some(year),
            Some(country),
        )?;
        Ok(Some(list.plants))
    }

    fn installed(
        &self,
        country: &str,
        year: i32,
        read: &mut BTreeSet<PathBuf>,
    ) -> Result<Option<BTreeMap<FuelType, f64>>> {
        let path = self.dir.join(format!("installed_capacity_{year}.csv"));
        if !path.exists() {
            return Ok(None);
        }
        let caps = load_installed_capacity(open_file(&path)?, year, &self.config.fuel_names())?;
        read.insert(path);
        Ok(caps.by_country.get(country).cloned())
    }

    fn source(
        &self,
        country: &str,
        year: i32,
        method: Method,
        carbon_price: Option<f64>,
        read: &mut BTreeSet<PathBuf>,
    ) -> Result<MeritOrderSource> {
        let c_ghg = self.carbon_price(year, carbon_price, read)?;
        let config = self.config.scenario(country, year, method, c_ghg)?;
        let params = self.params(country, year, read)?;
        let mut src = MeritOrderSource::new(config, params);
        match method {
            Method::Pp | Method::Pwlv => {
                src.plants = self.plants(country, year, read)?;
                if src.plants.is_none() && method == Method::Pwlv {
                    return Err(Error::Missing("PWLv requires plant-list capacities".into()));
                }
            }
            Method::Pwl => src.installed = self.installed(country, year, read)?,
        }
        Ok(src)
    }
}

fn ingest_one(
    config: &Config,
    raw: &Path,
    out: &Path,
    country: &str,
    year: i32,
    plants: Option<&Path>,
) -> Work {
    let mut read = BTreeSet::new();
    let rec = record(country, year, None, "");
    let result = (|| -> Result<ScenarioRecord> {
        let mut rec = rec.clone();
        let path = raw.join("generation").join(format!("{country}_{year}.csv"));
        let schema = GenerationSchema {
            timestamp_column: None,
            names: config.fuel_names(),
        };
        let parsed = parse_generation_csv(open_file(&path)?, &schema, country, year)?;
        read.insert(path);
        let mut hourly = resample_hourly(&parsed)?;
        detect_outliers_zscore(&mut hourly, config.zscore_threshold)?;
        let filled = fill_missing(hourly);
        rec.fill_fraction = Some(filled.fill_fraction());
        rec.warnings.extend(filled.warnings.iter().cloned());
        let name = format!("generation/{country}_{year}.csv");
        rec.outputs.push(write_output(out, &name, |w| {
            write_generation_csv(&filled, w)
        })?);
        let name = format!("fill_reports/{country}_{year}.csv");
        rec.outputs
            .push(write_output(out, &name, |w| write_fill_report(&filled, w))?);
        if let Some(p) = plants {
            let list = load_plant_list(
                open_file(p)?,
                &config.fuel_names(),
                Some(year),
                Some(country),
            )?;
            read.insert(p.to_path_buf());
            if !list.rejected.is_empty() {
                rec.warnings
                    .push(format!("{} plant rows rejected", list.rejected.len()));
            }
            let name = format!("plants/{country}_{year}.csv");
            rec.outputs.push(write_output(out, &name, |w| {
                write_plant_list(&list.plants, w)
            })?);
        }
        Ok(rec)
    })();
    match result {
        Ok(rec) => (rec, read),
        Err(e) => (failed(rec, &e), read),
    }
}

/// Normalize a raw data directory.
pub fn cmd_ingest(
    config: &Config,
    data_dir: &Path,
    out_dir: &Path,
    jobs: usize,
    args: &IngestArgs,
) -> Result<Outcome> {
    let scenarios = select(&data_dir.join("generation"), &args.select)?;

    // capacity statistics are required for every requested scenario
    let years: BTreeSet<i32> = scenarios.iter().map(|s| s.1).collect();
    let mut capacity: BTreeMap<i32, InstalledCapacity> = BTreeMap::new();
    let mut shared_inputs = BTreeSet::new();
    for &year in &years {
        let path = data_dir.join(format!("installed_capacity_{year}.csv"));
        if !path.exists() {
            let first = scenarios.iter().find(|s| s.1 == year).unwrap();
            return Err(Error::Missing(format!(
                "installed capacity for ({}, {year}): {} not found",
                first.0,
                path.display()
            )));
        }
        let caps = load_installed_capacity(open_file(&path)?, year, &config.fuel_names())?;
        shared_inputs.insert(path);
        capacity.insert(year, caps);
    }
    for (c, y) in &scenarios {
        capacity[y].country(c)?;
    }

    let plants = data_dir.join("plants.csv");
    let plants = plants.exists().then_some(plants);
    let mut works: Vec<Work> = pool(jobs)?.install(|| {
        scenarios
            .par_iter()
            .map(|(c, y)| ingest_one(config, data_dir, out_dir, c, *y, plants.as_deref()))
            .collect()
    });

    // shared tables, recorded under a pseudo-scenario
    let mut shared = record("ALL", 0, None, "");
    shared.id = "shared".into();
    let result = (|| -> Result<()> {
        for (year, caps) in &capacity {
            let name = format!("installed_capacity_{year}.csv");
            shared.outputs.push(write_output(out_dir, &name, |w| {
                write_installed_capacity(caps, w)
            })?);
            shared.warnings.extend(caps.warnings.iter().cloned());
        }
        let params = data_dir.join("fuel_params.csv");
        if params.exists() {
            let table = FuelParamTable::from_csv(open_file(&params)?, &config.fuel_names())?;
            shared_inputs.insert(params);
            shared
                .outputs
                .push(write_output(out_dir, "fuel_params.csv", |w| {
                    table.write_csv(w)
                })?);
        }
        let prices = data_dir.join("carbon_prices.csv");
        if prices.exists() {
            let weekly = load_weekly_prices(open_file(&prices)?)?;
            shared_inputs.insert(prices);
            let mut rows = Vec::new();
            for &y in &years {
                match annual_carbon_price(&weekly, y) {
                    Ok(p) => rows.push((y, p)),
                    Err(e) => shared.warnings.push(e.to_string()),
                }
            }
            shared
                .outputs
                .push(write_output(out_dir, "carbon_price.csv", |w| {
                    writeln!(w, "year,price_eur_t")
                        .map_err(|e| Error::io("carbon_price.csv", e))?;
                    for (y, p) in &rows {
                        writeln!(w, "{y},{}", exact(*p))
                            .map_err(|e| Error::io("carbon_price.csv", e))?;
                    }
                    Ok(())
                })?);
        }
        Ok(())
    })();
    let shared = match result {
        Ok(()) => shared,
        Err(e) => failed(shared, &e),
    };
    works.push((shared, shared_inputs));
    finish("ingest", config, data_dir, out_dir, works)
}

fn compute_one(
    ws: &Workspace,
    out: &Path,
    country: &str,
    year: i32,
    method: Method,
    c_ghg: Option<f64>,
) -> Work {
    let mut read = BTreeSet::new();
    let rec = record(country, year, Some(method), "");
    let result = (|| -> Result<ScenarioRecord> {
        let mut rec = rec.clone();
        let src = ws.source(country, year, method, c_ghg, &mut read)?;
        let gen = ws.generation(country, year, &mut read)?;
        let res = run_scenario(&src, &gen)?;
        let stem = format!("{country}_{year}_{}", method.slug());
        rec.outputs
            .push(write_output(out, &format!("cef/{stem}.csv"), |w| {
                res.cef.write_csv(w)
            })?);
        rec.outputs.push(write_output(
            out,
            &format!("merit_order/{stem}.csv"),
            |w| res.merit_order.write_csv(w),
        )?);
        rec.saturated_hours = Some(res.cef.saturated_hours());
        rec.invalid_hours = Some(res.cef.invalid_hours());
        rec.warnings.extend(res.cef.warnings);
        for (fuel, cap) in &res.merit_order.excluded {
            rec.warnings.push(format!(
                "{} MW of {fuel} left out: no fuel parameters",
                sig6(*cap)
            ));
        }
        Ok(rec)
    })();
    match result {
        Ok(rec) => (rec, read),
        Err(e) => (failed(rec, &e), read),
    }
}

/// One CEF series per country, year and method.
pub fn cmd_compute(
    config: &Config,
    data_dir: &Path,
    out_dir: &Path,
    jobs: usize,
    args: &ComputeArgs,
) -> Result<Outcome> {
    let scenarios = select(&data_dir.join("generation"), &args.select)?;
    let ws = Workspace {
        config,
        dir: data_dir,
    };
    let tasks: Vec<(String, i32, Method)> = scenarios
        .iter()
        .flat_map(|(c, y)| args.method.iter().map(move |m| (c.clone(), *y, *m)))
        .collect();
    let works = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|(c, y, m)| compute_one(&ws, out_dir, c, *y, *m, args.carbon_price))
            .collect()
    });
    finish("compute", config, data_dir, out_dir, works)
}

fn shift_one(
    ws: &Workspace,
    out: &Path,
    task: &(String, i32, Method, Driver),
    args: &ShiftArgs,
) -> Work {
    let (country, year, method, driver) = (&task.0, task.1, task.2, task.3);
    let mut read = BTreeSet::new();
    let rec = record(country, year, Some(method), &format!("_{driver}"));
    let result = (|| -> Result<ScenarioRecord> {
        let mut rec = rec.clone();
        let src = ws.source(country, year, method, args.carbon_price, &mut read)?;
        let gen = ws.generation(country, year, &mut read)?;
        let res = run_scenario(&src, &gen)?;
        let report = run_shift_study_with(&res.cef, driver, args.shift_kwh)?;
        let stem = format!("shift/{country}_{year}_{}_{driver}", method.slug());
        rec.outputs
            .push(write_output(out, &format!("{stem}_events.csv"), |w| {
                report.write_events_csv(w)
            })?);
        rec.outputs
            .push(write_output(out, &format!("{stem}_summary.txt"), |w| {
                report.write_summary(w)
            })?);
        rec.outputs
            .push(write_output(out, &format!("{stem}_fuel_pairs.csv"), |w| {
                report.write_fuel_pairs_csv(w)
            })?);
        rec.outputs
            .push(write_output(out, &format!("{stem}_hours.csv"), |w| {
                report.write_hours_csv(w)
            })?);
        rec.skipped_days = Some(report.skipped_days());
        rec.saturated_hours = Some(res.cef.saturated_hours());
        rec.warnings.extend(res.cef.warnings);
        Ok(rec)
    })();
    match result {
        Ok(rec) => (rec, read),
        Err(e) => (failed(rec, &e), read),
    }
}

/// Daily load-shift studies per scenario and driver.
pub fn cmd_shift(
    config: &Config,
    data_dir: &Path,
    out_dir: &Path,
    jobs: usize,
    args: &ShiftArgs,
) -> Result<Outcome> {
    let scenarios = select(&data_dir.join("generation"), &args.select)?;
    let ws = Workspace {
        config,
        dir: data_dir,
    };
    let mut tasks = Vec::new();
    for (c, y) in &scenarios {
        for m in &args.method {
            for d in &args.driver {
                tasks.push((c.clone(), *y, *m, *d));
            }
        }
    }
    let works = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|t| shift_one(&ws, out_dir, t, args))
            .collect()
    });
    finish("shift", config, data_dir, out_dir, works)
}

fn sweep_one(
    ws: &Workspace,
    out: &Path,
    task: &(String, i32, Method),
    grid: &[f64],
    args: &SweepArgs,
) -> Work {
    let (country, year, method) = (&task.0, task.1, task.2);
    let mut read = BTreeSet::new();
    let suffix = args.driver.map(|d| format!("_{d}")).unwrap_or_default();
    let rec = record(country, year, Some(method), &suffix);
    let weighting = if args.per_block {
        Weighting::PerBlock
    } else {
        Weighting::default()
    };
    let result = (|| -> Result<ScenarioRecord> {
        let mut rec = rec.clone();
        // the grid sets the carbon price, so no price lookup is needed
        let src = ws.source(country, year, method, Some(0.0), &mut read)?;
        let stem = format!("sweep/{country}_{year}_{}{suffix}", method.slug());
        let build = |c: f64| src.build_at(c);
        let crossing = match args.driver {
            Some(driver) => {
                let gen = ws.generation(country, year, &mut read)?;
                let rows = shift_study_vs_carbon_price(&src, &gen, driver, grid, weighting)?;
                rec.outputs
                    .push(write_output(out, &format!("{stem}.csv"), |w| {
                        write_shift_sweep_csv(&rows, w)
                    })?);
                let points: Vec<SweepPoint> = rows
                    .iter()
                    .map(|r| SweepPoint {
                        c_ghg: r.c_ghg,
                        r: r.r,
                    })
                    .collect();
                locate_zero_crossing(&points, &build, weighting)?
            }
            None => {
                let curve = carbon_price_sweep(build, grid, weighting)?;
                rec.outputs
                    .push(write_output(out, &format!("{stem}.csv"), |w| {
                        write_sweep_csv(&curve, w)
                    })?);
                curve.zero_crossing
            }
        };
        rec.outputs
            .push(write_output(out, &format!("{stem}_summary.txt"), |w| {
                writeln!(
                    w,
                    "zero_crossing_eur_t={}",
                    crossing.map(sig6).unwrap_or_else(|| "na".into())
                )
                .and_then(|_| writeln!(w, "grid_points={}", grid.len()))
                .map_err(|e| Error::io("sweep summary", e))
            })?);
        Ok(rec)
    })();
    match result {
        Ok(rec) => (rec, read),
        Err(e) => (failed(rec, &e), read),
    }
}

/// Carbon-price sweeps per scenario.
pub fn cmd_sweep(
    config: &Config,
    data_dir: &Path,
    out_dir: &Path,
    jobs: usize,
    args: &SweepArgs,
) -> Result<Outcome> {
    let grid = parse_grid(&args.cghg_grid)?;
    let scenarios = select(&data_dir.join("generation"), &args.select)?;
    let ws = Workspace {
        config,
        dir: data_dir,
    };
    let tasks: Vec<(String, i32, Method)> = scenarios
        .iter()
        .flat_map(|(c, y)| args.method.iter().map(move |m| (c.clone(), *y, *m)))
        .collect();
    let works = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|t| sweep_one(&ws, out_dir, t, &grid, args))
            .collect()
    });
    finish("sweep", config, data_dir, out_dir, works)
}

fn validate_one(
    ws: &Workspace,
    country: &str,
    year: i32,
    c_ghg: Option<f64>,
) -> (ScenarioRecord, BTreeSet<PathBuf>, Option<ValidationReport>) {
    let mut read = BTreeSet::new();
    let rec = record(country, year, None, "");
    let result = (|| -> Result<ValidationReport> {
        let gen = ws.generation(country, year, &mut read)?;
        let pp = run_scenario(
            &ws.source(country, year, Method::Pp, c_ghg, &mut read)?,
            &gen,
        )?;
        let pwlv = run_scenario(
            &ws.source(country, year, Method::Pwlv, c_ghg, &mut read)?,
            &gen,
        )?;
        validation_errors(&pp.merit_order, &pp.cef, &pwlv.merit_order, &pwlv.cef)
    })();
    match result {
        Ok(rep) => (rec, read, Some(rep)),
        Err(e) => (failed(rec, &e), read, None),
    }
}

/// PWLv-vs-PP errors, one CSV per country with a row per error type and year.
pub fn cmd_validate(
    config: &Config,
    data_dir: &Path,
    out_dir: &Path,
    jobs: usize,
    args: &ValidateArgs,
) -> Result<Outcome> {
    let scenarios = select(&data_dir.join("generation"), &args.select)?;
    let ws = Workspace {
        config,
        dir: data_dir,
    };
    let results: Vec<_> = pool(jobs)?.install(|| {
        scenarios
            .par_iter()
            .map(|(c, y)| validate_one(&ws, c, *y, args.carbon_price))
            .collect()
    });
    let mut by_country: BTreeMap<String, Vec<(usize, ValidationReport)>> = BTreeMap::new();
    let mut works: Vec<Work> = Vec::new();
    for (i, (rec, read, rep)) in results.into_iter().enumerate() {
        if let Some(rep) = rep {
            by_country
                .entry(rec.country.clone())
                .or_default()
                .push((i, rep));
        }
        works.push((rec, read));
    }
    for (country, reports) in by_country {
        let name = format!("validation/{country}.csv");
        let mut reps: Vec<ValidationReport> = reports.iter().map(|(_, r)| r.clone()).collect();
        reps.sort_by_key(|r| r.year);
        let written = write_output(out_dir, &name, |w| write_validation_csv(&reps, w));
        for (i, _) in &reports {
            let rec = &mut works[*i].0;
            match &written {
                Ok(n) => rec.outputs.push(n.clone()),
                Err(e) => {
                    rec.status = "failed".into();
                    rec.error = Some(e.to_string());
                }
            }
        }
    }
    finish("validate", config, data_dir, out_dir, works)
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let config = match &cli.config {
        Some(path) => Config::load(path),
        None => Ok(Config::bundled()),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let (data, out, jobs) = (&cli.data_dir, &cli.out_dir, cli.jobs);
    let outcome = match &cli.command {
        Command::Ingest(a) => cmd_ingest(&config, data, out, jobs, a),
        Command::Compute(a) => cmd_compute(&config, data, out, jobs, a),
        Command::Shift(a) => cmd_shift(&config, data, out, jobs, a),
        Command::Sweep(a) => cmd_sweep(&config, data, out, jobs, a),
        Command::Validate(a) => cmd_validate(&config, data, out, jobs, a),
    };
    match outcome {
        Ok(o) => o.exit_code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Parse the process arguments and run.
pub fn main() -> i32 {
    run(&Cli::parse())
}
