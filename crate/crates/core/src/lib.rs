//! Reconstruct national merit orders from fuel-type data and derive hourly
//! marginal (MEF) and grid-mix (XEF) carbon emission factors, marginal prices
//! and load-shift effects.
//!
//! The pipeline is:
//!
//! 1. [`ingest`] raw generation, capacity, plant and price data,
//! 2. build a [`merit_order`] (plant list or piecewise-linear virtual plants),
//! 3. [`dispatch`] it against the hourly residual load,
//! 4. run [`loadshift`] studies and [`analysis`] on the results.
//!
//! [`cli`] wires these together behind the `cefsim` binary.

// `!(x > 0.0)` guards deliberately reject NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dispatch;
mod error;
pub mod fmt;
pub mod fuel;
pub mod ingest;
pub mod loadshift;
pub mod merit_order;
pub mod scenario;
pub mod synthetic;

pub use error::{Error, Result};
pub use fuel::{FuelClass, FuelType};
