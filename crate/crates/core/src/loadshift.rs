//! Daily load-shift studies: each day a fixed amount of energy is moved from
//! the hour where the incentive signal peaks to the hour where it bottoms
//! out, and the resulting changes in cost, grid-mix emissions (XE) and
//! marginal emissions (ME) are accumulated.
//!
//! Relative changes are taken against the shifted energy's baseline, i.e.
//! `100 * sum(v_sink - v_source) / sum(v_source)` over all events.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::dispatch::CefSeries;
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::fuel::FuelType;

/// Energy moved per event unless stated otherwise, kWh.
pub const DEFAULT_SHIFT_KWH: f64 = 1.0;

/// Incentive signal that picks the source and sink hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Driver {
    Price,
    Xef,
    Mef,
}

impl Driver {
    pub const ALL: [Driver; 3] = [Driver::Price, Driver::Xef, Driver::Mef];

    pub fn name(self) -> &'static str {
        match self {
            Driver::Price => "price",
            Driver::Xef => "xef",
            Driver::Mef => "mef",
        }
    }

    /// Summary key of the metric this driver optimizes.
    pub fn optimized_key(self) -> &'static str {
        match self {
            Driver::Price => "dc_pct",
            Driver::Xef => "dxe_pct",
            Driver::Mef => "dme_pct",
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Driver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "price" => Ok(Driver::Price),
            "xef" => Ok(Driver::Xef),
            "mef" => Ok(Driver::Mef),
            _ => Err(Error::Parse(format!(
                "unknown driver '{s}' (price|xef|mef)"
            ))),
        }
    }
}

/// Source and sink positions chosen for one day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DailyChoice {
    pub date: NaiveDate,
    /// Index into the series of the source (peak) hour.
    pub source: usize,
    /// Index into the series of the sink (trough) hour.
    pub sink: usize,
}

/// Result of scanning a signal day by day.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DailyChoices {
    pub choices: Vec<DailyChoice>,
    /// Days without 24 consecutive hourly values.
    pub partial_days: Vec<NaiveDate>,
    /// Complete days with at least one missing or invalid signal value.
    pub invalid_days: Vec<NaiveDate>,
    /// Complete days where the signal was constant: no shift happens.
    pub flat_days: usize,
}

impl DailyChoices {
    pub fn skipped_days(&self) -> usize {
        self.partial_days.len() + self.invalid_days.len()
    }
}

fn is_complete_day(hours: &[NaiveDateTime]) -> bool {
    hours.len() == 24
        && hours
            .iter()
            .enumerate()
            .all(|(h, ts)| ts.hour() as usize == h && ts.minute() == 0)
}

/// Pick the source (first maximum) and sink (first minimum) of every
/// complete day. Days with a zero spread produce no choice.
pub fn daily_shift_events(index: &[NaiveDateTime], signal: &[Option<f64>]) -> Result<DailyChoices> {
    if index.len() != signal.len() {
        return Err(Error::InvalidInput(format!(
            "index has {} entries but the signal has {}",
            index.len(),
            signal.len()
        )));
    }
    let mut out = DailyChoices::default();
    let mut start = 0;
    while start < index.len() {
        let date = index[start].date();
        let mut end = start;
        while end < index.len() && index[end].date() == date {
            end += 1;
        }
        if !is_complete_day(&index[start..end]) {
            out.partial_days.push(date);
        } else if signal[start..end]
            .iter()
            .any(|v| !v.is_some_and(f64::is_finite))
        {
            out.invalid_days.push(date);
        } else {
            let values: Vec<f64> = signal[start..end].iter().map(|v| v.unwrap()).collect();
            let mut hi = 0;
            let mut lo = 0;
            for (h, &v) in values.iter().enumerate() {
                if v > values[hi] {
                    hi = h;
                }
                if v < values[lo] {
                    lo = h;
                }
            }
            if values[hi] > values[lo] {
                out.choices.push(DailyChoice {
                    date,
                    source: start + hi,
                    sink: start + lo,
                });
            } else {
                out.flat_days += 1;
            }
        }
        start = end;
    }
    Ok(out)
}

/// Values of one signal at the source and sink hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub source: f64,
    pub sink: f64,
}

impl Pair {
    pub fn delta(&self) -> f64 {
        self.sink - self.source
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftEvent {
    pub date: NaiveDate,
    pub source_hour: u32,
    pub sink_hour: u32,
    pub source_fuel: FuelType,
    pub sink_fuel: FuelType,
    /// EUR/MWh
    pub price: Pair,
    /// t/MWh
    pub xef: Pair,
    /// t/MWh
    pub mef: Pair,
    pub energy_kwh: f64,
}

impl ShiftEvent {
    pub fn values(&self, driver: Driver) -> Pair {
        match driver {
            Driver::Price => self.price,
            Driver::Xef => self.xef,
            Driver::Mef => self.mef,
        }
    }
}

/// Relative changes of the shifted energy's cost and emissions, percent.
/// `None` when there were no events or the source baseline sums to zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftChanges {
    pub dc_pct: Option<f64>,
    pub dxe_pct: Option<f64>,
    pub dme_pct: Option<f64>,
}

impl ShiftChanges {
    pub fn get(&self, driver: Driver) -> Option<f64> {
        match driver {
            Driver::Price => self.dc_pct,
            Driver::Xef => self.dxe_pct,
            Driver::Mef => self.dme_pct,
        }
    }
}

fn relative_change(events: &[ShiftEvent], driver: Driver) -> Option<f64> {
    let (num, den) = events.iter().fold((0.0, 0.0), |(n, d), e| {
        let p = e.values(driver);
        (n + p.delta() * e.energy_kwh, d + p.source * e.energy_kwh)
    });
    if den == 0.0 {
        None
    } else {
        Some(100.0 * num / den)
    }
}

/// Accumulate the relative changes over all events.
pub fn evaluate_shifts(events: &[ShiftEvent]) -> ShiftChanges {
    ShiftChanges {
        dc_pct: relative_change(events, Driver::Price),
        dxe_pct: relative_change(events, Driver::Xef),
        dme_pct: relative_change(events, Driver::Mef),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub country: String,
    pub year: i32,
    pub driver: Driver,
    pub events: Vec<ShiftEvent>,
    pub changes: ShiftChanges,
    /// Counts of (source fuel, sink fuel) combinations.
    pub fuel_pairs: BTreeMap<(FuelType, FuelType), usize>,
    pub source_hours: [usize; 24],
    pub sink_hours: [usize; 24],
    pub partial_days: usize,
    pub invalid_days: usize,
    pub flat_days: usize,
}

impl ShiftReport {
    pub fn skipped_days(&self) -> usize {
        self.partial_days + self.invalid_days
    }

    /// Event table: `date, source_hour, sink_hour, src_fuel, sink_fuel,
    /// d_price, d_xef, d_mef`, the deltas being sink minus source.
    pub fn write_events_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record([
            "date",
            "source_hour",
            "sink_hour",
            "src_fuel",
            "sink_fuel",
            "d_price",
            "d_xef",
            "d_mef",
        ])?;
        for e in &self.events {
            wtr.write_record([
                e.date.format("%Y-%m-%d").to_string(),
                e.source_hour.to_string(),
                e.sink_hour.to_string(),
                e.source_fuel.to_string(),
                e.sink_fuel.to_string(),
                sig6(e.price.delta()),
                sig6(e.xef.delta()),
                sig6(e.mef.delta()),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<shift events>", e))?;
        Ok(())
    }

    /// Flat `key=value` summary. Undefined changes are written as `na`.
    pub fn write_summary<W: Write>(&self, mut sink: W) -> Result<()> {
        let na = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| "na".into());
        let lines = [
            "# relative changes: 100 * sum(sink - source) / sum(source) over events".to_string(),
            format!("country={}", self.country),
            format!("year={}", self.year),
            format!("driver={}", self.driver),
            format!("optimized={}", self.driver.optimized_key()),
            format!("dc_pct={}", na(self.changes.dc_pct)),
            format!("dxe_pct={}", na(self.changes.dxe_pct)),
            format!("dme_pct={}", na(self.changes.dme_pct)),
            format!("n_events={}", self.events.len()),
            format!("n_skipped_days={}", self.skipped_days()),
            format!("n_flat_days={}", self.flat_days),
        ];
        for l in lines {
            writeln!(sink, "{l}").map_err(|e| Error::io("<shift summary>", e))?;
        }
        Ok(())
    }

    /// Histogram of marginal-fuel combinations: `src_fuel, sink_fuel, count`.
    pub fn write_fuel_pairs_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record(["src_fuel", "sink_fuel", "count"])?;
        for ((a, b), n) in &self.fuel_pairs {
            wtr.write_record([a.to_string(), b.to_string(), n.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<fuel pairs>", e))?;
        Ok(())
    }

    /// Hour-of-day distribution: `hour, source_count, sink_count`.
    pub fn write_hours_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record(["hour", "source_count", "sink_count"])?;
        for h in 0..24 {
            wtr.write_record([
                h.to_string(),
                self.source_hours[h].to_string(),
                self.sink_hours[h].to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<shift hours>", e))?;
        Ok(())
    }
}

/// The signal a driver reads from the series. Hours with an invalid XEF are
/// masked for every driver so all three metrics stay evaluable.
pub fn driver_signal(cef: &CefSeries, driver: Driver) -> Vec<Option<f64>> {
    cef.hours
        .iter()
        .map(|h| {
            h.xef?;
            Some(match driver {
                Driver::Price => h.marginal_cost,
                Driver::Xef => h.xef.unwrap(),
                Driver::Mef => h.mef,
            })
        })
        .collect()
}

/// Shift `shift_kwh` every day under `driver` and evaluate all three metrics.
pub fn run_shift_study_with(
    cef: &CefSeries,
    driver: Driver,
    shift_kwh: f64,
) -> Result<ShiftReport> {
    if !(shift_kwh > 0.0) {
        return Err(Error::InvalidInput(format!(
            "shift energy must be positive, got {shift_kwh}"
        )));
    }
    let signal = driver_signal(cef, driver);
    let days = daily_shift_events(&cef.index, &signal)?;
    let mut events = Vec::with_capacity(days.choices.len());
    let mut fuel_pairs = BTreeMap::new();
    let mut source_hours = [0; 24];
    let mut sink_hours = [0; 24];
    for c in &days.choices {
        let (src, snk) = (&cef.hours[c.source], &cef.hours[c.sink]);
        let e = ShiftEvent {
            date: c.date,
            source_hour: cef.index[c.source].hour(),
            sink_hour: cef.index[c.sink].hour(),
            source_fuel: src.marginal_fuel,
            sink_fuel: snk.marginal_fuel,
            price: Pair {
                source: src.marginal_cost,
                sink: snk.marginal_cost,
            },
            // masked days guarantee both XEF values exist
            xef: Pair {
                source: src.xef.unwrap(),
                sink: snk.xef.unwrap(),
            },
            mef: Pair {
                source: src.mef,
                sink: snk.mef,
            },
            energy_kwh: shift_kwh,
        };
        *fuel_pairs.entry((e.source_fuel, e.sink_fuel)).or_insert(0) += 1;
        source_hours[e.source_hour as usize] += 1;
        sink_hours[e.sink_hour as usize] += 1;
        events.push(e);
    }
    Ok(ShiftReport {
        country: cef.country.clone(),
        year: cef.year,
        driver,
        changes: evaluate_shifts(&events),
        events,
        fuel_pairs,
        source_hours,
        sink_hours,
        partial_days: days.partial_days.len(),
        invalid_days: days.invalid_days.len(),
        flat_days: days.flat_days,
    })
}

/// [`run_shift_study_with`] at the default 1 kWh.
pub fn run_shift_study(cef: &CefSeries, driver: Driver) -> Result<ShiftReport> {
    run_shift_study_with(cef, driver, DEFAULT_SHIFT_KWH)
}
