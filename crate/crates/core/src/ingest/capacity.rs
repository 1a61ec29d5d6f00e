use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fmt::exact;
use crate::fuel::{FuelNames, FuelType};

/// Installed generation capacity per country and fuel type for one year, MW.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstalledCapacity {
    pub year: i32,
    pub by_country: BTreeMap<String, BTreeMap<FuelType, f64>>,
    pub warnings: Vec<String>,
}

impl InstalledCapacity {
    pub fn country(&self, country: &str) -> Result<&BTreeMap<FuelType, f64>> {
        self.by_country.get(country).ok_or_else(|| {
            Error::Missing(format!("installed capacity for ({country}, {})", self.year))
        })
    }
}

/// Read a country x fuel capacity matrix: first column `country`, one
/// column per fuel label. Empty cells mean "no data" and are left out.
pub fn load_installed_capacity<R: Read>(
    source: R,
    year: i32,
    names: &FuelNames,
) -> Result<InstalledCapacity> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("country") {
        return Err(Error::Parse(
            "capacity file must start with a 'country' column".into(),
        ));
    }
    let mut out = InstalledCapacity {
        year,
        ..Default::default()
    };
    let mut mapping = Vec::new();
    for (i, h) in headers.iter().enumerate().skip(1) {
        match names.lookup(h) {
            Some(f) => mapping.push((i, f)),
            None => out
                .warnings
                .push(format!("unknown fuel column '{h}' skipped")),
        }
    }
    for row in rdr.records() {
        let row = row?;
        let country = row.get(0).unwrap_or("").to_string();
        let mut caps: BTreeMap<FuelType, f64> = BTreeMap::new();
        for &(i, fuel) in &mapping {
            let cell = row.get(i).unwrap_or("");
            if cell.is_empty() || cell == "-" {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse(format!("bad capacity '{cell}' for {country}/{fuel}")))?;
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "capacity for {country}/{fuel} must be non-negative, got {v}"
                )));
            }
            *caps.entry(fuel).or_insert(0.0) += v;
        }
        out.by_country.insert(country, caps);
    }
    Ok(out)
}

/// Canonical capacity matrix: fuels in canonical order, empty cells where a
/// country has no value.
pub fn write_installed_capacity<W: Write>(caps: &InstalledCapacity, sink: W) -> Result<()> {
    let fuels: std::collections::BTreeSet<FuelType> = caps
        .by_country
        .values()
        .flat_map(|m| m.keys().copied())
        .collect();
    let mut wtr = csv::Writer::from_writer(sink);
    let mut header = vec!["country".to_string()];
    header.extend(fuels.iter().map(|f| f.to_string()));
    wtr.write_record(&header)?;
    for (country, m) in &caps.by_country {
        let mut row = vec![country.clone()];
        row.extend(
            fuels
                .iter()
                .map(|f| m.get(f).map(|v| exact(*v)).unwrap_or_default()),
        );
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<capacity>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_matrix_with_gaps() {
        let csv =
            "country,Fossil Gas,Nuclear,Fossil Hard coal\nDE,30000,9500,22000\nDK,2500,,1800\n";
        let caps = load_installed_capacity(csv.as_bytes(), 2019, &FuelNames::default()).unwrap();
        let dk = caps.country("DK").unwrap();
        assert_eq!(dk.get(&FuelType::Gas), Some(&2500.0));
        assert!(!dk.contains_key(&FuelType::Nuclear));
        let err = caps.country("FR").unwrap_err().to_string();
        assert!(err.contains("FR") && err.contains("2019"));
    }

    #[test]
    fn round_trip() {
        let csv = "country,gas,nuclear\nDE,30000,9500\nDK,2500,\n";
        let caps = load_installed_capacity(csv.as_bytes(), 2019, &FuelNames::default()).unwrap();
        let mut buf = Vec::new();
        write_installed_capacity(&caps, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), csv);
    }
}
