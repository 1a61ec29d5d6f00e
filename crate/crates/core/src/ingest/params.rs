use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::exact;
use crate::fuel::{FuelNames, FuelType};

/// Emission intensity (t CO2eq per MWh of fuel) and price (EUR per MWh of
/// fuel) of one fuel type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelParam {
    pub emission_t_per_mwh: f64,
    pub price_eur_per_mwh: f64,
}

/// Fuel parameters resolved for one country-year.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FuelParams(BTreeMap<FuelType, FuelParam>);

impl FuelParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, fuel: FuelType, emission_t_per_mwh: f64, price_eur_per_mwh: f64) -> Self {
        self.0.insert(
            fuel,
            FuelParam {
                emission_t_per_mwh,
                price_eur_per_mwh,
            },
        );
        self
    }

    /// Parameters of `fuel`; combined-cycle gas burns the same fuel as gas
    /// and falls back to the gas entry.
    pub fn get(&self, fuel: FuelType) -> Option<&FuelParam> {
        self.0.get(&fuel).or_else(|| match fuel {
            FuelType::GasCc => self.0.get(&FuelType::Gas),
            _ => None,
        })
    }

    pub fn contains(&self, fuel: FuelType) -> bool {
        self.get(fuel).is_some()
    }

    pub fn require(&self, fuel: FuelType) -> Result<&FuelParam> {
        self.get(fuel).ok_or(Error::UnknownFuel(fuel))
    }

    pub fn iter(&self) -> impl Iterator<Item = (FuelType, &FuelParam)> {
        self.0.iter().map(|(f, p)| (*f, p))
    }

    /// Multiply every fuel price by `factor`.
    pub fn scale_prices(&self, factor: f64) -> Self {
        FuelParams(
            self.0
                .iter()
                .map(|(f, p)| {
                    (
                        *f,
                        FuelParam {
                            price_eur_per_mwh: p.price_eur_per_mwh * factor,
                            ..*p
                        },
                    )
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelParamEntry {
    /// `None` applies to every year.
    pub year: Option<i32>,
    /// `None` applies to every country.
    pub country: Option<String>,
    pub fuel: FuelType,
    pub emission_t_per_mwh: f64,
    pub price_eur_per_mwh: f64,
}

impl FuelParamEntry {
    fn validate(&self) -> Result<()> {
        if !(self.emission_t_per_mwh >= 0.0) || !(self.price_eur_per_mwh >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "fuel parameters for {} must be non-negative",
                self.fuel
            )));
        }
        if self.fuel == FuelType::Nuclear && self.emission_t_per_mwh != 0.0 {
            return Err(Error::InvalidInput(
                "nuclear emission intensity must be zero".into(),
            ));
        }
        Ok(())
    }
}

/// Fuel parameters keyed by (year, country, fuel), where year and country
/// may be wildcards.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FuelParamTable {
    pub entries: Vec<FuelParamEntry>,
}

impl FuelParamTable {
    pub fn new(entries: Vec<FuelParamEntry>) -> Result<Self> {
        for e in &entries {
            e.validate()?;
        }
        Ok(FuelParamTable { entries })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Most specific entry per fuel: exact year beats wildcard year, then
    /// exact country beats wildcard country.
    pub fn resolve(&self, year: i32, country: &str) -> FuelParams {
        let mut best: BTreeMap<FuelType, (u8, &FuelParamEntry)> = BTreeMap::new();
        for e in &self.entries {
            let year_rank = match e.year {
                Some(y) if y == year => 2,
                None => 0,
                Some(_) => continue,
            };
            let country_rank = match e.country.as_deref() {
                Some(c) if c == country => 1,
                None => 0,
                Some(_) => continue,
            };
            let rank = year_rank + country_rank;
            match best.get(&e.fuel) {
                Some((r, _)) if *r >= rank => {}
                _ => {
                    best.insert(e.fuel, (rank, e));
                }
            }
        }
        FuelParams(
            best.into_iter()
                .map(|(f, (_, e))| {
                    (
                        f,
                        FuelParam {
                            emission_t_per_mwh: e.emission_t_per_mwh,
                            price_eur_per_mwh: e.price_eur_per_mwh,
                        },
                    )
                })
                .collect(),
        )
    }

    /// Read `year,country,fuel,emission_t_per_mwh,price_eur_per_mwh`; empty
    /// year or country cells are wildcards.
    pub fn from_csv<R: Read>(source: R, names: &FuelNames) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(source);
        let mut entries = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let field = |i: usize| row.get(i).unwrap_or("");
            let num = |i: usize| {
                field(i).parse::<f64>().map_err(|_| {
                    Error::Parse(format!("bad number '{}' in fuel parameters", field(i)))
                })
            };
            let year = match field(0) {
                "" => None,
                y => Some(
                    y.parse()
                        .map_err(|_| Error::Parse(format!("bad year '{y}' in fuel parameters")))?,
                ),
            };
            let country = match field(1) {
                "" => None,
                c => Some(c.to_string()),
            };
            let fuel = names.lookup(field(2)).ok_or_else(|| {
                Error::Parse(format!("unknown fuel '{}' in fuel parameters", field(2)))
            })?;
            entries.push(FuelParamEntry {
                year,
                country,
                fuel,
                emission_t_per_mwh: num(3)?,
                price_eur_per_mwh: num(4)?,
            });
        }
        FuelParamTable::new(entries)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record([
            "year",
            "country",
            "fuel",
            "emission_t_per_mwh",
            "price_eur_per_mwh",
        ])?;
        for e in &self.entries {
            wtr.write_record([
                e.year.map(|y| y.to_string()).unwrap_or_default(),
                e.country.clone().unwrap_or_default(),
                e.fuel.to_string(),
                exact(e.emission_t_per_mwh),
                exact(e.price_eur_per_mwh),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<fuel parameters>", e))?;
        Ok(())
    }
}
