//! Rank correlations, carbon-price sweeps and PP-vs-PWLv validation errors.

mod correlation;
mod sweep;
mod validation;

pub use correlation::{
    merit_order_correlation, rank_average, spearman, CorrelationContext, CorrelationResult,
    Weighting, DEFAULT_ELEMENT_MW,
};
pub use sweep::{
    carbon_price_sweep, locate_zero_crossing, parse_grid, shift_study_vs_carbon_price,
    write_shift_sweep_csv, write_sweep_csv, ShiftSweepRow, SweepCurve, SweepPoint,
    CROSSING_TOLERANCE,
};
pub use validation::{validation_errors, write_validation_csv, ValidationReport};
