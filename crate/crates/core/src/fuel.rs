//! Fuel types, their conventional/renewable classification and the label
//! renaming table used when reading external data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_FUEL_NAMES: &str = include_str!("../data/fuel_names.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FuelClass {
    Conv,
    Res,
}

/// A generation fuel type. `GasCc` is combined-cycle gas, split from `Gas`
/// by capacity share; it is treated as a fuel type of its own everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FuelType {
    Biomass,
    Lignite,
    CoalGas,
    Gas,
    GasCc,
    Coal,
    Oil,
    OilShale,
    Peat,
    Geothermal,
    PumpedHydro,
    Hydro,
    HydroReservoir,
    Marine,
    Nuclear,
    OtherConv,
    OtherRes,
    Solar,
    Waste,
    WindOffshore,
    WindOnshore,
}

impl FuelType {
    pub const ALL: [FuelType; 21] = [
        FuelType::Biomass,
        FuelType::Lignite,
        FuelType::CoalGas,
        FuelType::Gas,
        FuelType::GasCc,
        FuelType::Coal,
        FuelType::Oil,
        FuelType::OilShale,
        FuelType::Peat,
        FuelType::Geothermal,
        FuelType::PumpedHydro,
        FuelType::Hydro,
        FuelType::HydroReservoir,
        FuelType::Marine,
        FuelType::Nuclear,
        FuelType::OtherConv,
        FuelType::OtherRes,
        FuelType::Solar,
        FuelType::Waste,
        FuelType::WindOffshore,
        FuelType::WindOnshore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FuelType::Biomass => "biomass",
            FuelType::Lignite => "lignite",
            FuelType::CoalGas => "coal_gas",
            FuelType::Gas => "gas",
            FuelType::GasCc => "gas_cc",
            FuelType::Coal => "coal",
            FuelType::Oil => "oil",
            FuelType::OilShale => "oil_shale",
            FuelType::Peat => "peat",
            FuelType::Geothermal => "geothermal",
            FuelType::PumpedHydro => "pumped_hydro",
            FuelType::Hydro => "hydro",
            FuelType::HydroReservoir => "hydro_reservoir",
            FuelType::Marine => "marine",
            FuelType::Nuclear => "nuclear",
            FuelType::OtherConv => "other_conv",
            FuelType::OtherRes => "other_res",
            FuelType::Solar => "solar",
            FuelType::Waste => "waste",
            FuelType::WindOffshore => "wind_offshore",
            FuelType::WindOnshore => "wind_onshore",
        }
    }

    pub fn class(self) -> FuelClass {
        match self {
            FuelType::Lignite
            | FuelType::CoalGas
            | FuelType::Gas
            | FuelType::GasCc
            | FuelType::Coal
            | FuelType::Oil
            | FuelType::OilShale
            | FuelType::Peat
            | FuelType::Nuclear
            | FuelType::OtherConv
            | FuelType::Waste => FuelClass::Conv,
            FuelType::Biomass
            | FuelType::Geothermal
            | FuelType::PumpedHydro
            | FuelType::Hydro
            | FuelType::HydroReservoir
            | FuelType::Marine
            | FuelType::OtherRes
            | FuelType::Solar
            | FuelType::WindOffshore
            | FuelType::WindOnshore => FuelClass::Res,
        }
    }

    pub fn is_conv(self) -> bool {
        self.class() == FuelClass::Conv
    }

    /// Conventional fuels with cost and emission data, the only ones that
    /// form dispatch blocks and enter the residual load.
    pub fn is_merit_order_fuel(self) -> bool {
        matches!(
            self,
            FuelType::Nuclear
                | FuelType::Lignite
                | FuelType::Coal
                | FuelType::Gas
                | FuelType::GasCc
                | FuelType::Oil
        )
    }
}

impl fmt::Display for FuelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FuelType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FuelType::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown fuel type '{s}'")))
    }
}

/// Maps external labels ("Fossil Brown coal/Lignite", "Hard coal", ...) to
/// fuel types. Canonical fuel names always map to themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct FuelNames {
    labels: BTreeMap<String, FuelType>,
}

impl FuelNames {
    /// Parse a two-column `label,fuel` CSV table.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut labels = BTreeMap::new();
        for row in rdr.records() {
            let row = row?;
            let (Some(label), Some(fuel)) = (row.get(0), row.get(1)) else {
                return Err(Error::Parse(
                    "fuel name table needs label,fuel columns".into(),
                ));
            };
            labels.insert(label.to_string(), fuel.parse()?);
        }
        Ok(FuelNames { labels })
    }

    pub fn insert(&mut self, label: impl Into<String>, fuel: FuelType) {
        self.labels.insert(label.into(), fuel);
    }

    pub fn lookup(&self, label: &str) -> Option<FuelType> {
        let label = label.trim();
        self.labels
            .get(label)
            .copied()
            .or_else(|| label.parse().ok())
    }
}

impl Default for FuelNames {
    fn default() -> Self {
        FuelNames::from_csv(DEFAULT_FUEL_NAMES.as_bytes())
            .expect("bundled fuel name table is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fuel_round_trips_through_its_name() {
        for f in FuelType::ALL {
            assert_eq!(f.name().parse::<FuelType>().unwrap(), f);
        }
    }

    #[test]
    fn gas_cc_is_distinct_and_conventional() {
        assert_ne!(FuelType::GasCc, FuelType::Gas);
        assert!(FuelType::GasCc.is_conv());
    }

    #[test]
    fn default_renaming_table() {
        let names = FuelNames::default();
        assert_eq!(
            names.lookup("Fossil Brown coal/Lignite"),
            Some(FuelType::Lignite)
        );
        assert_eq!(names.lookup("Fossil Hard coal"), Some(FuelType::Coal));
        assert_eq!(
            names.lookup("Hydro Run-of-river and poundage"),
            Some(FuelType::Hydro)
        );
        assert_eq!(names.lookup("Biomass"), Some(FuelType::Biomass));
        assert_eq!(names.lookup("gas_cc"), Some(FuelType::GasCc));
        assert_eq!(names.lookup("Unobtainium"), None);
    }

    #[test]
    fn etp_labels_cover_twenty_fuel_types() {
        let names = FuelNames::default();
        let etp: std::collections::BTreeSet<_> = DEFAULT_FUEL_NAMES
            .lines()
            .skip(1)
            .take(20)
            .filter_map(|l| names.lookup(l.split(',').next().unwrap()))
            .collect();
        assert_eq!(etp.len(), 20);
        assert!(!etp.contains(&FuelType::GasCc));
    }
}
