use std::io::Write;

use serde::{Deserialize, Serialize};

use super::correlation::DEFAULT_ELEMENT_MW;
use crate::dispatch::CefSeries;
use crate::error::{Error, Result};
use crate::fmt::sig6_opt;
use crate::merit_order::MeritOrder;

/// Relative errors of a candidate (PWLv) against a reference (PP), percent.
/// `None` where every reference value was zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub year: i32,
    /// Marginal cost along the merit order.
    pub mo_cost: Option<f64>,
    /// Emission intensity along the merit order.
    pub mo_emission: Option<f64>,
    pub price: Option<f64>,
    pub mef: Option<f64>,
    pub xef: Option<f64>,
    pub price_annual: Option<f64>,
    pub mef_annual: Option<f64>,
    pub xef_annual: Option<f64>,
    /// Capacity elements left out because the reference value was zero.
    pub excluded_elements_cost: usize,
    pub excluded_elements_emission: usize,
    /// Hours left out because the reference value was zero or invalid.
    pub excluded_hours_price: usize,
    pub excluded_hours_mef: usize,
    pub excluded_hours_xef: usize,
}

impl ValidationReport {
    /// `(name, value)` in output order.
    pub fn entries(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("mo_cost", self.mo_cost),
            ("mo_emission", self.mo_emission),
            ("price", self.price),
            ("mef", self.mef),
            ("xef", self.xef),
            ("price_annual", self.price_annual),
            ("mef_annual", self.mef_annual),
            ("xef_annual", self.xef_annual),
        ]
    }
}

/// Mean of `|c - r| / |r|` over pairs with a non-zero reference, in percent,
/// and the number of pairs skipped.
fn mean_relative_error(
    pairs: impl Iterator<Item = (Option<f64>, Option<f64>)>,
) -> (Option<f64>, usize) {
    let (mut sum, mut n, mut skipped) = (0.0, 0usize, 0usize);
    for (r, c) in pairs {
        match (r, c) {
            (Some(r), Some(c)) if r != 0.0 => {
                sum += (c - r).abs() / r.abs();
                n += 1;
            }
            _ => skipped += 1,
        }
    }
    ((n > 0).then(|| 100.0 * sum / n as f64), skipped)
}

/// `|mean(c) - mean(r)| / |mean(r)|` over hours where both are valid.
fn annual_error(pairs: impl Iterator<Item = (Option<f64>, Option<f64>)>) -> Option<f64> {
    let (mut sr, mut sc, mut n) = (0.0, 0.0, 0usize);
    for (r, c) in pairs {
        if let (Some(r), Some(c)) = (r, c) {
            sr += r;
            sc += c;
            n += 1;
        }
    }
    if n == 0 || sr == 0.0 {
        return None;
    }
    Some(100.0 * (sc - sr).abs() / sr.abs())
}

/// Compare a candidate merit order and series against a reference: merit
/// orders along 10 MW elements up to the smaller total capacity, series
/// hour by hour and as annual means.
pub fn validation_errors(
    reference_mo: &MeritOrder,
    reference: &CefSeries,
    candidate_mo: &MeritOrder,
    candidate: &CefSeries,
) -> Result<ValidationReport> {
    if reference.index != candidate.index {
        return Err(Error::InvalidInput(
            "reference and candidate series cover different hours".into(),
        ));
    }
    if reference_mo.is_empty() || candidate_mo.is_empty() {
        return Err(Error::EmptyMeritOrder);
    }
    let total = reference_mo
        .total_capacity_mw
        .min(candidate_mo.total_capacity_mw);
    let n = (total / DEFAULT_ELEMENT_MW).ceil() as usize;
    let elements: Vec<(usize, usize)> = (0..n)
        .map(|k| {
            let centre = ((k as f64 + 0.5) * DEFAULT_ELEMENT_MW).min(total);
            (reference_mo.block_at(centre), candidate_mo.block_at(centre))
        })
        .collect();
    let (mo_cost, excluded_elements_cost) = mean_relative_error(elements.iter().map(|&(r, c)| {
        (
            Some(reference_mo.blocks[r].marginal_cost),
            Some(candidate_mo.blocks[c].marginal_cost),
        )
    }));
    let (mo_emission, excluded_elements_emission) =
        mean_relative_error(elements.iter().map(|&(r, c)| {
            (
                Some(reference_mo.blocks[r].emission_intensity),
                Some(candidate_mo.blocks[c].emission_intensity),
            )
        }));

    let hours = || reference.hours.iter().zip(&candidate.hours);
    let price = || hours().map(|(r, c)| (Some(r.marginal_cost), Some(c.marginal_cost)));
    let mef = || hours().map(|(r, c)| (Some(r.mef), Some(c.mef)));
    let xef = || hours().map(|(r, c)| (r.xef, c.xef));
    let (price_err, excluded_hours_price) = mean_relative_error(price());
    let (mef_err, excluded_hours_mef) = mean_relative_error(mef());
    let (xef_err, excluded_hours_xef) = mean_relative_error(xef());
    Ok(ValidationReport {
        year: reference.year,
        mo_cost,
        mo_emission,
        price: price_err,
        mef: mef_err,
        xef: xef_err,
        price_annual: annual_error(price()),
        mef_annual: annual_error(mef()),
        xef_annual: annual_error(xef()),
        excluded_elements_cost,
        excluded_elements_emission,
        excluded_hours_price,
        excluded_hours_mef,
        excluded_hours_xef,
    })
}

/// Validation CSV: `error_name, year, value_pct`, one row per error type and
/// report.
pub fn write_validation_csv<W: Write>(reports: &[ValidationReport], sink: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(["error_name", "year", "value_pct"])?;
    for rep in reports {
        for (name, value) in rep.entries() {
            wtr.write_record([name.to_string(), rep.year.to_string(), sig6_opt(value)])?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<validation>", e))?;
    Ok(())
}
