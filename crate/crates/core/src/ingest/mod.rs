//! Parsing and cleaning of input datasets: hourly generation series,
//! installed capacities, plant lists, fuel parameters and carbon prices.

mod capacity;
mod carbon;
mod generation;
mod params;
mod plants;

pub use capacity::{load_installed_capacity, write_installed_capacity, InstalledCapacity};
pub use carbon::{annual_carbon_price, load_weekly_prices, WeeklyPrice};
pub use generation::{
    detect_outliers_zscore, fill_missing, format_timestamp, parse_generation_csv, parse_timestamp,
    read_fill_report, resample_hourly, write_fill_report, write_generation_csv, FillKind,
    FillRecord, GenerationSchema, GenerationSeries, OutlierFlag, DEFAULT_ZSCORE_THRESHOLD,
};
pub use params::{FuelParam, FuelParamEntry, FuelParamTable, FuelParams};
pub use plants::{load_plant_list, write_plant_list, PlantList, PowerPlant, RejectedRow};
