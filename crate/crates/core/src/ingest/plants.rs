use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::exact;
use crate::fuel::{FuelNames, FuelType};

/// A dispatchable unit with known capacity and electrical efficiency.
/// Virtual plants produced by the piecewise-linear method use the same type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPlant {
    pub id: String,
    pub country: String,
    pub fuel: FuelType,
    pub capacity_mw: f64,
    pub efficiency: f64,
    pub commissioned: i32,
    pub shutdown: Option<i32>,
}

impl PowerPlant {
    pub fn new(id: impl Into<String>, fuel: FuelType, capacity_mw: f64, efficiency: f64) -> Self {
        PowerPlant {
            id: id.into(),
            country: String::new(),
            fuel,
            capacity_mw,
            efficiency,
            commissioned: i32::MIN,
            shutdown: None,
        }
    }

    /// Commissioned in or before `year` and not yet shut down in `year`.
    pub fn is_active(&self, year: i32) -> bool {
        self.commissioned <= year && self.shutdown.is_none_or(|s| year < s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity_mw > 0.0) || !self.capacity_mw.is_finite() {
            return Err(Error::InvalidInput(format!(
                "plant {}: capacity must be positive, got {}",
                self.id, self.capacity_mw
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "plant {}: efficiency must be in (0, 1], got {}",
                self.id, self.efficiency
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlantList {
    pub plants: Vec<PowerPlant>,
    pub rejected: Vec<RejectedRow>,
    /// Valid rows dropped because they were not active in the requested year.
    pub inactive: usize,
    /// Valid rows dropped because of the country filter.
    pub other_country: usize,
}

fn parse_year(s: &str) -> Option<i32> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(y) = s.parse::<i32>() {
        return Some(y);
    }
    if let Ok(y) = s.parse::<f64>() {
        return y.is_finite().then_some(y.floor() as i32);
    }
    // ISO date: take the year component
    s.get(0..4).and_then(|y| y.parse().ok())
}

/// Read a plant list with columns
/// `id,country,fuel,capacity_mw,efficiency,commissioned,shutdown`.
///
/// Rows with unknown fuel, missing efficiency, non-positive capacity or an
/// efficiency outside (0, 1] are rejected with a reason. When `year` is given
/// only plants active in that year are kept; when `country` is given only
/// plants of that country are kept.
pub fn load_plant_list<R: Read>(
    source: R,
    names: &FuelNames,
    year: Option<i32>,
    country: Option<&str>,
) -> Result<PlantList> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("plant list lacks column '{name}'")))
    };
    let (c_id, c_country, c_fuel, c_cap, c_eff, c_comm, c_shut) = (
        col("id")?,
        col("country")?,
        col("fuel")?,
        col("capacity_mw")?,
        col("efficiency")?,
        col("commissioned")?,
        col("shutdown")?,
    );

    let mut out = PlantList::default();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let get = |c: usize| record.get(c).unwrap_or("");
        let id = get(c_id).to_string();
        let reject = |reason: String| RejectedRow {
            row: i + 1,
            id: id.clone(),
            reason,
        };

        let Some(fuel) = names.lookup(get(c_fuel)) else {
            out.rejected
                .push(reject(format!("unknown fuel '{}'", get(c_fuel))));
            continue;
        };
        let Ok(capacity_mw) = get(c_cap).parse::<f64>() else {
            out.rejected
                .push(reject(format!("unparseable capacity '{}'", get(c_cap))));
            continue;
        };
        if get(c_eff).is_empty() {
            out.rejected.push(reject("missing efficiency".into()));
            continue;
        }
        let Ok(efficiency) = get(c_eff).parse::<f64>() else {
            out.rejected
                .push(reject(format!("unparseable efficiency '{}'", get(c_eff))));
            continue;
        };
        let Some(commissioned) = parse_year(get(c_comm)) else {
            out.rejected.push(reject(format!(
                "unparseable commissioning year '{}'",
                get(c_comm)
            )));
            continue;
        };
        let plant = PowerPlant {
            id: id.clone(),
            country: get(c_country).to_string(),
            fuel,
            capacity_mw,
            efficiency,
            commissioned,
            shutdown: parse_year(get(c_shut)),
        };
        if let Err(e) = plant.validate() {
            out.rejected.push(reject(e.to_string()));
            continue;
        }
        if country.is_some_and(|c| c != plant.country) {
            out.other_country += 1;
            continue;
        }
        if year.is_some_and(|y| !plant.is_active(y)) {
            out.inactive += 1;
            continue;
        }
        out.plants.push(plant);
    }
    Ok(out)
}

pub fn write_plant_list<W: Write>(plants: &[PowerPlant], sink: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record([
        "id",
        "country",
        "fuel",
        "capacity_mw",
        "efficiency",
        "commissioned",
        "shutdown",
    ])?;
    for p in plants {
        wtr.write_record([
            p.id.clone(),
            p.country.clone(),
            p.fuel.to_string(),
            exact(p.capacity_mw),
            exact(p.efficiency),
            p.commissioned.to_string(),
            p.shutdown.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<plant list>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIST: &str = "\
id,country,fuel,capacity_mw,efficiency,commissioned,shutdown
a,DE,Lignite,500,0.38,1990,
b,DE,coal,300,0.42,2020,
c,DE,coal,300,0.40,1980,2018
d,AT,gas_cc,400,0.55,2005,
e,DE,Natural gas,-5,0.3,2000,
f,DE,oil,50,,2000,
g,DE,oil,50,1.2,2000,
h,DE,nuclear,1200,0.33,1985.0,2022
";

    fn load(year: Option<i32>, country: Option<&str>) -> PlantList {
        load_plant_list(LIST.as_bytes(), &FuelNames::default(), year, country).unwrap()
    }

    #[test]
    fn activity_window() {
        let list = load(Some(2019), None);
        let ids: Vec<_> = list.plants.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["a", "d", "h"]);
        assert_eq!(list.inactive, 2);
    }

    #[test]
    fn commissioned_after_year_is_excluded() {
        let p = PowerPlant {
            commissioned: 2020,
            ..PowerPlant::new("x", FuelType::Coal, 1.0, 0.4)
        };
        assert!(!p.is_active(2019));
        assert!(p.is_active(2020));
    }

    #[test]
    fn shut_down_before_year_is_excluded() {
        let p = PowerPlant {
            commissioned: 2000,
            shutdown: Some(2018),
            ..PowerPlant::new("x", FuelType::Coal, 1.0, 0.4)
        };
        assert!(!p.is_active(2019));
        assert!(!p.is_active(2018));
        assert!(p.is_active(2017));
    }

    #[test]
    fn country_filter() {
        let list = load(Some(2019), Some("DE"));
        assert!(list.plants.iter().all(|p| p.country == "DE"));
        assert_eq!(list.other_country, 1);
    }

    #[test]
    fn invalid_rows_are_rejected_with_reason() {
        let list = load(None, None);
        let rejected: Vec<_> = list
            .rejected
            .iter()
            .map(|r| (r.id.as_str(), r.reason.as_str()))
            .collect();
        assert_eq!(rejected.len(), 3);
        assert!(rejected[0].0 == "e" && rejected[0].1.contains("capacity"));
        assert!(rejected[1].0 == "f" && rejected[1].1.contains("missing efficiency"));
        assert!(rejected[2].0 == "g" && rejected[2].1.contains("efficiency"));
    }

    #[test]
    fn fuel_names_are_normalized() {
        let list = load(None, None);
        assert_eq!(list.plants[0].fuel, FuelType::Lignite);
        assert_eq!(list.plants.last().unwrap().commissioned, 1985);
    }

    #[test]
    fn written_list_reads_back() {
        let list = load(None, None);
        let mut buf = Vec::new();
        write_plant_list(&list.plants, &mut buf).unwrap();
        let again = load_plant_list(buf.as_slice(), &FuelNames::default(), None, None).unwrap();
        assert_eq!(again.plants, list.plants);
    }
}
