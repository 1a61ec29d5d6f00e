use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::exact;
use crate::fuel::{FuelClass, FuelNames, FuelType};

/// Smallest |Z| the outlier screen flags by default.
pub const DEFAULT_ZSCORE_THRESHOLD: f64 = 12.0;

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillKind {
    ForwardFill,
    Backfill,
    Outlier,
}

impl FillKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FillKind::ForwardFill => "forward_fill",
            FillKind::Backfill => "backfill",
            FillKind::Outlier => "outlier",
        }
    }
}

impl fmt::Display for FillKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FillRecord {
    pub timestamp: NaiveDateTime,
    pub fuel: FuelType,
    pub kind: FillKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierFlag {
    pub timestamp: NaiveDateTime,
    pub fuel: FuelType,
    pub value: f64,
    pub zscore: f64,
}

/// Net generation per fuel type for one country-year, in MWh/h (average
/// power per interval). `None` marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSeries {
    pub country: String,
    pub year: i32,
    pub resolution_minutes: u32,
    pub index: Vec<NaiveDateTime>,
    pub columns: BTreeMap<FuelType, Vec<Option<f64>>>,
    pub fill_report: Vec<FillRecord>,
    pub warnings: Vec<String>,
}

impl GenerationSeries {
    pub fn new(country: impl Into<String>, year: i32, index: Vec<NaiveDateTime>) -> Self {
        GenerationSeries {
            country: country.into(),
            year,
            resolution_minutes: 60,
            index,
            columns: BTreeMap::new(),
            fill_report: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Add a fully observed column.
    pub fn with_column(mut self, fuel: FuelType, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            self.index.len(),
            "column length must match index"
        );
        self.columns
            .insert(fuel, values.into_iter().map(Some).collect());
        self
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn fuels(&self) -> impl Iterator<Item = FuelType> + '_ {
        self.columns.keys().copied()
    }

    pub fn value(&self, fuel: FuelType, t: usize) -> Option<f64> {
        self.columns.get(&fuel).and_then(|c| c[t])
    }

    pub fn missing_count(&self) -> usize {
        self.columns
            .values()
            .map(|c| c.iter().filter(|v| v.is_none()).count())
            .sum()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_count() == 0
    }

    /// Total generation over all fuels at hour `t`, treating missing as zero.
    pub fn total_at(&self, t: usize) -> f64 {
        self.columns.values().filter_map(|c| c[t]).sum()
    }

    pub fn class_total_at(&self, t: usize, class: FuelClass) -> f64 {
        self.columns
            .iter()
            .filter(|(f, _)| f.class() == class)
            .filter_map(|(_, c)| c[t])
            .sum()
    }

    /// Share of data points that were imputed (forward fill or backfill).
    pub fn fill_fraction(&self) -> f64 {
        let points = self.len() * self.columns.len();
        if points == 0 {
            return 0.0;
        }
        let filled = self
            .fill_report
            .iter()
            .filter(|r| r.kind != FillKind::Outlier)
            .count();
        filled as f64 / points as f64
    }

    fn position(&self, ts: NaiveDateTime) -> Option<usize> {
        self.index.binary_search(&ts).ok()
    }
}

#[derive(Debug, Clone, Default)]
pub struct GenerationSchema {
    /// Header of the timestamp column. `None` accepts `timestamp` (any case)
    /// or an unnamed first column.
    pub timestamp_column: Option<String>,
    pub names: FuelNames,
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

/// Parse an ISO-8601 timestamp. Timestamps carrying a UTC offset are
/// converted to UTC; naive timestamps are taken as they are.
pub fn parse_timestamp(s: &str) -> Result<NaiveDateTime> {
    let s = s.trim();
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(ts) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(ts);
        }
    }
    if let Ok(ts) = DateTime::parse_from_rfc3339(s) {
        return Ok(ts.naive_utc());
    }
    for fmt in [
        "%Y-%m-%d %H:%M:%S%:z",
        "%Y-%m-%d %H:%M:%S%z",
        "%Y-%m-%dT%H:%M%:z",
    ] {
        if let Ok(ts) = DateTime::parse_from_str(s, fmt) {
            return Ok(ts.naive_utc());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists"));
    }
    Err(Error::Parse(format!("cannot parse timestamp '{s}'")))
}

fn parse_cell(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0)
}

/// Read a generation CSV with one timestamp column and one column per fuel
/// label. The raw resolution is kept; unparseable, negative and empty cells
/// become missing. Unknown fuel columns are skipped with a warning.
pub fn parse_generation_csv<R: Read>(
    source: R,
    schema: &GenerationSchema,
    country: &str,
    year: i32,
) -> Result<GenerationSeries> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let headers = rdr.headers()?.clone();

    let ts_col = match &schema.timestamp_column {
        Some(name) => headers.iter().position(|h| h.trim() == name),
        None => headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case("timestamp"))
            .or_else(|| (headers.get(0).map(str::trim) == Some("")).then_some(0)),
    }
    .ok_or_else(|| Error::Parse("missing timestamp column".into()))?;

    let mut warnings = Vec::new();
    let mut mapping: Vec<(usize, FuelType)> = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == ts_col {
            continue;
        }
        match schema.names.lookup(h) {
            Some(fuel) => mapping.push((i, fuel)),
            None => warnings.push(format!("unknown fuel column '{h}' skipped")),
        }
    }

    let mut rows: Vec<(NaiveDateTime, BTreeMap<FuelType, Option<f64>>)> = Vec::new();
    let mut bad_cells = 0usize;
    for record in rdr.records() {
        let record = record?;
        let ts = parse_timestamp(record.get(ts_col).unwrap_or(""))?;
        let mut values: BTreeMap<FuelType, Option<f64>> = BTreeMap::new();
        for &(i, fuel) in &mapping {
            let raw = record.get(i).unwrap_or("");
            let v = parse_cell(raw);
            if v.is_none() && !raw.trim().is_empty() {
                bad_cells += 1;
            }
            // several labels may map onto one fuel type; they are summed
            let slot = values.entry(fuel).or_insert(Some(0.0));
            *slot = match (*slot, v) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
        rows.push((ts, values));
    }
    if bad_cells > 0 {
        warnings.push(format!(
            "{bad_cells} unparseable or negative cells treated as missing"
        ));
    }
    rows.sort_by_key(|(ts, _)| *ts);

    let index: Vec<NaiveDateTime> = rows.iter().map(|(ts, _)| *ts).collect();
    let resolution_minutes = index
        .windows(2)
        .map(|w| (w[1] - w[0]).num_minutes())
        .filter(|&m| m > 0)
        .min()
        .unwrap_or(60) as u32;

    let mut series = GenerationSeries::new(country, year, index);
    series.resolution_minutes = resolution_minutes;
    series.warnings = warnings;
    for &(_, fuel) in &mapping {
        let column = rows.iter().map(|(_, v)| v[&fuel]).collect();
        series.columns.insert(fuel, column);
    }
    Ok(series)
}

fn year_hours(year: i32) -> Result<Vec<NaiveDateTime>> {
    let start = NaiveDate::from_ymd_opt(year, 1, 1)
        .ok_or_else(|| Error::InvalidInput(format!("invalid year {year}")))?
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists");
    let end = NaiveDate::from_ymd_opt(year + 1, 1, 1)
        .ok_or_else(|| Error::InvalidInput(format!("invalid year {year}")))?
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists");
    let n = (end - start).num_hours();
    Ok((0..n).map(|h| start + Duration::hours(h)).collect())
}

/// Average sub-hourly values into hour-beginning bins covering the full
/// calendar year (8760 or 8784 hours). Hours without any observed value stay
/// missing; points outside the year are dropped with a warning.
pub fn resample_hourly(raw: &GenerationSeries) -> Result<GenerationSeries> {
    let res = raw.resolution_minutes;
    if res == 0 || 60 % res != 0 {
        return Err(Error::Data(format!(
            "resolution of {res} minutes does not divide an hour"
        )));
    }
    let hours = year_hours(raw.year)?;
    let start = hours[0];
    let n = hours.len();

    let mut slot_of_point = Vec::with_capacity(raw.len());
    let mut outside = 0usize;
    let mut prev: Option<NaiveDateTime> = None;
    for &ts in &raw.index {
        let hour_label = ts
            .with_minute(0)
            .and_then(|t| t.with_second(0))
            .and_then(|t| t.with_nanosecond(0))
            .expect("zeroing minutes is valid");
        if ts.second() != 0 || ts.nanosecond() != 0 || ts.minute() % res != 0 {
            return Err(Error::Data(format!(
                "irregular spacing in hour {}",
                format_timestamp(hour_label)
            )));
        }
        if prev == Some(ts) {
            return Err(Error::Data(format!(
                "irregular spacing in hour {}: duplicate timestamp {}",
                format_timestamp(hour_label),
                format_timestamp(ts)
            )));
        }
        prev = Some(ts);
        if ts.year() != raw.year {
            outside += 1;
            slot_of_point.push(None);
            continue;
        }
        slot_of_point.push(Some((hour_label - start).num_hours() as usize));
    }

    let mut out = GenerationSeries::new(raw.country.clone(), raw.year, hours);
    out.warnings = raw.warnings.clone();
    out.fill_report = raw.fill_report.clone();
    if outside > 0 {
        out.warnings.push(format!(
            "{outside} points outside {} dropped during resampling",
            raw.year
        ));
    }
    for (&fuel, column) in &raw.columns {
        let mut sums = vec![0.0; n];
        let mut counts = vec![0u32; n];
        for (slot, v) in slot_of_point.iter().zip(column) {
            if let (Some(h), Some(v)) = (slot, v) {
                sums[*h] += v;
                counts[*h] += 1;
            }
        }
        let hourly = sums
            .into_iter()
            .zip(counts)
            .map(|(s, c)| (c > 0).then(|| s / c as f64))
            .collect();
        out.columns.insert(fuel, hourly);
    }
    Ok(out)
}

/// Flag points whose per-column Z-score magnitude exceeds `threshold`,
/// convert them to missing and record them in the fill report. Z-scores use
/// the population standard deviation of the observed values of each column.
pub fn detect_outliers_zscore(
    series: &mut GenerationSeries,
    threshold: f64,
) -> Result<Vec<OutlierFlag>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidInput(format!(
            "z-score threshold must be positive, got {threshold}"
        )));
    }
    let mut flags = Vec::new();
    for (&fuel, column) in series.columns.iter_mut() {
        let observed: Vec<f64> = column.iter().flatten().copied().collect();
        let n = observed.len() as f64;
        if observed.len() < 2 {
            continue;
        }
        let mean = observed.iter().sum::<f64>() / n;
        let var = observed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        if !(sd > 0.0) {
            series
                .warnings
                .push(format!("zero variance in {fuel}; outlier screen skipped"));
            continue;
        }
        for (t, cell) in column.iter_mut().enumerate() {
            if let Some(v) = *cell {
                let z = (v - mean) / sd;
                if z.abs() > threshold {
                    flags.push(OutlierFlag {
                        timestamp: series.index[t],
                        fuel,
                        value: v,
                        zscore: z,
                    });
                    *cell = None;
                }
            }
        }
    }
    flags.sort_by_key(|f| (f.timestamp, f.fuel));
    series.fill_report.extend(flags.iter().map(|f| FillRecord {
        timestamp: f.timestamp,
        fuel: f.fuel,
        kind: FillKind::Outlier,
    }));
    Ok(flags)
}

/// Forward-fill missing values; leading gaps take the first observed value.
/// Columns without any observation are dropped with a warning.
pub fn fill_missing(mut series: GenerationSeries) -> GenerationSeries {
    let mut dropped = Vec::new();
    let mut records = Vec::new();
    for (&fuel, column) in series.columns.iter_mut() {
        let Some(first) = column.iter().position(Option::is_some) else {
            dropped.push(fuel);
            continue;
        };
        let first_value = column[first];
        let mut last = first_value;
        for (t, cell) in column.iter_mut().enumerate() {
            match *cell {
                Some(_) => last = *cell,
                None => {
                    let kind = if t < first {
                        *cell = first_value;
                        FillKind::Backfill
                    } else {
                        *cell = last;
                        FillKind::ForwardFill
                    };
                    records.push(FillRecord {
                        timestamp: series.index[t],
                        fuel,
                        kind,
                    });
                }
            }
        }
    }
    for fuel in dropped {
        series.columns.remove(&fuel);
        series.warnings.push(format!(
            "column {fuel} has no observed values and was dropped"
        ));
    }
    series.fill_report.extend(records);
    series
        .fill_report
        .sort_by_key(|r| (r.timestamp, r.fuel, r.kind));
    series
}

/// Write the canonical generation CSV: `timestamp` followed by one column per
/// fuel in canonical order, values in shortest round-trip form.
pub fn write_generation_csv<W: Write>(series: &GenerationSeries, sink: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(sink);
    let mut header = vec!["timestamp".to_string()];
    header.extend(series.fuels().map(|f| f.name().to_string()));
    wtr.write_record(&header)?;
    for (t, ts) in series.index.iter().enumerate() {
        let mut row = vec![format_timestamp(*ts)];
        row.extend(
            series
                .columns
                .values()
                .map(|c| c[t].map(exact).unwrap_or_default()),
        );
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<generation csv>", e))?;
    Ok(())
}

pub fn write_fill_report<W: Write>(series: &GenerationSeries, sink: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(["timestamp", "fuel", "kind"])?;
    for r in &series.fill_report {
        wtr.write_record([
            format_timestamp(r.timestamp),
            r.fuel.to_string(),
            r.kind.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<fill report>", e))?;
    Ok(())
}

pub fn read_fill_report<R: Read>(source: R) -> Result<Vec<FillRecord>> {
    let mut rdr = csv::Reader::from_reader(source);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let kind = match row.get(2).unwrap_or("") {
            "forward_fill" => FillKind::ForwardFill,
            "backfill" => FillKind::Backfill,
            "outlier" => FillKind::Outlier,
            other => return Err(Error::Parse(format!("unknown fill kind '{other}'"))),
        };
        out.push(FillRecord {
            timestamp: parse_timestamp(row.get(0).unwrap_or(""))?,
            fuel: row.get(1).unwrap_or("").parse()?,
            kind,
        });
    }
    Ok(out)
}

impl GenerationSeries {
    /// Indices of the fill report that refer to positions in this series.
    pub fn filled_positions(&self) -> Vec<(usize, FuelType)> {
        self.fill_report
            .iter()
            .filter(|r| r.kind != FillKind::Outlier)
            .filter_map(|r| self.position(r.timestamp).map(|t| (t, r.fuel)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> NaiveDateTime {
        parse_timestamp(s).unwrap()
    }

    fn column(series: &GenerationSeries, fuel: FuelType) -> Vec<Option<f64>> {
        series.columns[&fuel].clone()
    }

    #[test]
    fn parses_quarter_hourly_file() {
        let csv = "timestamp,Fossil Gas,Nuclear\n\
                   2019-01-01T00:00:00,1,10\n\
                   2019-01-01T00:15:00,2,10\n\
                   2019-01-01T00:30:00,3,10\n\
                   2019-01-01T00:45:00,4,10\n";
        let s =
            parse_generation_csv(csv.as_bytes(), &GenerationSchema::default(), "DE", 2019).unwrap();
        assert_eq!(s.resolution_minutes, 15);
        let points: usize = s.columns.values().map(Vec::len).sum();
        assert_eq!(points, 8);
        assert_eq!(
            column(&s, FuelType::Gas),
            vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]
        );
    }

    #[test]
    fn empty_cell_becomes_missing() {
        let csv = "timestamp,Fossil Gas,Nuclear\n2019-01-01 00:00,,10\n2019-01-01 01:00,5,10\n";
        let s =
            parse_generation_csv(csv.as_bytes(), &GenerationSchema::default(), "DE", 2019).unwrap();
        assert_eq!(s.value(FuelType::Gas, 0), None);
        assert_eq!(s.value(FuelType::Gas, 1), Some(5.0));
    }

    #[test]
    fn lignite_label_is_renamed() {
        let csv = "timestamp,Fossil Brown coal/Lignite\n2019-01-01T00:00:00,7\n";
        let s =
            parse_generation_csv(csv.as_bytes(), &GenerationSchema::default(), "DE", 2019).unwrap();
        assert_eq!(s.value(FuelType::Lignite, 0), Some(7.0));
    }

    #[test]
    fn missing_timestamp_column_is_fatal() {
        let csv = "time,Nuclear\n2019-01-01T00:00:00,7\n";
        let err = parse_generation_csv(csv.as_bytes(), &GenerationSchema::default(), "DE", 2019)
            .unwrap_err();
        assert!(err.to_string().contains("timestamp"));
    }

    #[test]
    fn unknown_fuel_column_is_skipped_with_warning() {
        let csv = "timestamp,Nuclear,Antimatter\n2019-01-01T00:00:00,7,1\n";
        let s =
            parse_generation_csv(csv.as_bytes(), &GenerationSchema::default(), "DE", 2019).unwrap();
        assert_eq!(s.columns.len(), 1);
        assert!(s.warnings.iter().any(|w| w.contains("Antimatter")));
    }

    #[test]
    fn offset_timestamps_are_converted_to_utc() {
        assert_eq!(ts("2019-01-01 01:00:00+01:00"), ts("2019-01-01T00:00:00"));
        assert_eq!(ts("2019-01-01T00:00:00Z"), ts("2019-01-01 00:00"));
    }

    fn quarter_hour_series(values: &[Option<f64>]) -> GenerationSeries {
        let start = ts("2019-01-01T00:00:00");
        let index = (0..values.len())
            .map(|i| start + Duration::minutes(15 * i as i64))
            .collect();
        let mut s = GenerationSeries::new("DE", 2019, index);
        s.resolution_minutes = 15;
        s.columns.insert(FuelType::Coal, values.to_vec());
        s
    }

    #[test]
    fn resample_takes_hourly_mean() {
        let s = quarter_hour_series(&[Some(100.0); 4]);
        let h = resample_hourly(&s).unwrap();
        assert_eq!(h.len(), 8760);
        assert_eq!(h.value(FuelType::Coal, 0), Some(100.0));
        assert_eq!(h.value(FuelType::Coal, 1), None);

        let s = quarter_hour_series(&[Some(0.0), Some(100.0), Some(100.0), Some(200.0)]);
        assert_eq!(
            resample_hourly(&s).unwrap().value(FuelType::Coal, 0),
            Some(100.0)
        );
    }

    #[test]
    fn resample_keeps_all_missing_hour_missing() {
        let s = quarter_hour_series(&[None, None, None, None, Some(4.0), None, Some(8.0), None]);
        let h = resample_hourly(&s).unwrap();
        assert_eq!(h.value(FuelType::Coal, 0), None);
        assert_eq!(h.value(FuelType::Coal, 1), Some(6.0));
    }

    #[test]
    fn hourly_input_is_identity() {
        let index = year_hours(2020).unwrap();
        let values: Vec<f64> = (0..index.len()).map(|i| (i % 17) as f64 * 3.5).collect();
        let s = GenerationSeries::new("DE", 2020, index).with_column(FuelType::Gas, values);
        let h = resample_hourly(&s).unwrap();
        assert_eq!(h.len(), 8784);
        assert_eq!(h.columns, s.columns);
    }

    #[test]
    fn irregular_spacing_names_the_hour() {
        let index = vec![
            ts("2019-01-01T00:00:00"),
            ts("2019-01-01T00:15:00"),
            ts("2019-01-01T05:20:00"),
        ];
        let mut s = GenerationSeries::new("DE", 2019, index);
        s.resolution_minutes = 15;
        s.columns.insert(FuelType::Coal, vec![Some(1.0); 3]);
        let err = resample_hourly(&s).unwrap_err().to_string();
        assert!(err.contains("2019-01-01T05:00:00"), "{err}");
    }

    #[test]
    fn resolution_must_divide_an_hour() {
        let mut s = quarter_hour_series(&[Some(1.0)]);
        s.resolution_minutes = 25;
        assert!(resample_hourly(&s).is_err());
    }

    fn hourly_series(values: Vec<Option<f64>>) -> GenerationSeries {
        let start = ts("2019-01-01T00:00:00");
        let index = (0..values.len())
            .map(|i| start + Duration::hours(i as i64))
            .collect();
        let mut s = GenerationSeries::new("DE", 2019, index);
        s.columns.insert(FuelType::Coal, values);
        s
    }

    #[test]
    fn single_spike_zscore_by_hand() {
        // nine zeros and one spike a: mean a/10, population sd 0.3a,
        // z(spike) = 0.9a / 0.3a = 3, z(zero) = -1/3
        let mut values = vec![Some(0.0); 10];
        values[6] = Some(50.0);
        let mut s = hourly_series(values);
        let flags = detect_outliers_zscore(&mut s, 2.5).unwrap();
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].timestamp, s.index[6]);
        assert!((flags[0].zscore - 3.0).abs() < 1e-12);
        assert_eq!(s.value(FuelType::Coal, 6), None);
        assert_eq!(s.fill_report.len(), 1);
        assert_eq!(s.fill_report[0].kind, FillKind::Outlier);
    }

    #[test]
    fn spike_in_a_long_constant_column_is_flagged_at_default_threshold() {
        let mut values = vec![Some(500.0); 8760];
        values[4000] = Some(500.0 + 1.0e6);
        let mut s = hourly_series(values);
        let flags = detect_outliers_zscore(&mut s, DEFAULT_ZSCORE_THRESHOLD).unwrap();
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].timestamp, s.index[4000]);
    }

    #[test]
    fn constant_column_has_no_flags() {
        let mut s = hourly_series(vec![Some(3.0); 100]);
        let flags = detect_outliers_zscore(&mut s, 12.0).unwrap();
        assert!(flags.is_empty());
        assert!(s.warnings.iter().any(|w| w.contains("zero variance")));
    }

    #[test]
    fn below_threshold_has_no_flags() {
        // one spike among n points has |z| = sqrt(n - 1); n = 122 gives 11
        let mut values = vec![Some(0.0); 122];
        values[0] = Some(10.0);
        let mut s = hourly_series(values);
        let max_z = 121f64.sqrt();
        assert!((max_z - 11.0).abs() < 1e-12);
        assert!(detect_outliers_zscore(&mut s, 12.0).unwrap().is_empty());
    }

    #[test]
    fn nonpositive_threshold_is_rejected() {
        let mut s = hourly_series(vec![Some(3.0); 3]);
        assert!(detect_outliers_zscore(&mut s, 0.0).is_err());
    }

    #[test]
    fn forward_fill_and_backfill() {
        let s = fill_missing(hourly_series(vec![Some(5.0), None, None, Some(7.0)]));
        assert_eq!(
            column(&s, FuelType::Coal),
            vec![Some(5.0), Some(5.0), Some(5.0), Some(7.0)]
        );
        assert_eq!(s.fill_report.len(), 2);
        assert!(s
            .fill_report
            .iter()
            .all(|r| r.kind == FillKind::ForwardFill));

        let s = fill_missing(hourly_series(vec![None, Some(3.0), Some(4.0)]));
        assert_eq!(
            column(&s, FuelType::Coal),
            vec![Some(3.0), Some(3.0), Some(4.0)]
        );
        assert_eq!(s.fill_report[0].kind, FillKind::Backfill);
    }

    #[test]
    fn fill_fraction_counts_imputed_points() {
        let mut values = vec![Some(1.0); 1000];
        for v in values.iter_mut().skip(100).take(19) {
            *v = None;
        }
        let s = fill_missing(hourly_series(values));
        assert!((s.fill_fraction() - 0.019).abs() < 1e-15);
    }

    #[test]
    fn empty_column_is_dropped() {
        let mut s = hourly_series(vec![Some(1.0), Some(2.0)]);
        s.columns.insert(FuelType::Oil, vec![None, None]);
        let s = fill_missing(s);
        assert!(!s.columns.contains_key(&FuelType::Oil));
        assert!(s.warnings.iter().any(|w| w.contains("oil")));
    }

    #[test]
    fn canonical_csv_round_trips() {
        let mut s = hourly_series(vec![Some(0.1 + 0.2), None, Some(1e-7)]);
        s.columns.insert(
            FuelType::WindOnshore,
            vec![Some(3.0), Some(12345.678), Some(0.0)],
        );
        let mut first = Vec::new();
        write_generation_csv(&s, &mut first).unwrap();
        let parsed =
            parse_generation_csv(first.as_slice(), &GenerationSchema::default(), "DE", 2019)
                .unwrap();
        assert_eq!(parsed.columns, s.columns);
        let mut second = Vec::new();
        write_generation_csv(&parsed, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn fill_report_round_trips() {
        let s = fill_missing(hourly_series(vec![None, Some(3.0), None]));
        let mut buf = Vec::new();
        write_fill_report(&s, &mut buf).unwrap();
        assert_eq!(read_fill_report(buf.as_slice()).unwrap(), s.fill_report);
    }
}
