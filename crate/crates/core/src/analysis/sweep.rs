use std::io::Write;

use rayon::prelude::*;

use super::correlation::{merit_order_correlation, Weighting};
use crate::dispatch::compute_cef_series;
use crate::error::{Error, Result};
use crate::fmt::sig6_opt;
use crate::ingest::GenerationSeries;
use crate::loadshift::{run_shift_study, Driver, ShiftChanges};
use crate::merit_order::MeritOrder;
use crate::scenario::MeritOrderSource;

/// Width of the bracket left when bisection stops, EUR/t.
pub const CROSSING_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// EUR/t
    pub c_ghg: f64,
    /// `None` where the correlation is undefined.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub points: Vec<SweepPoint>,
    /// Carbon price where r first changes sign, EUR/t.
    pub zero_crossing: Option<f64>,
}

/// Parse `start:stop:step` into an inclusive, strictly increasing grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Parse(format!("grid '{text}' is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidInput(format!(
            "grid '{text}' needs step > 0 and stop >= start"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty carbon price grid".into()));
    }
    if grid.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::InvalidInput(
            "carbon prices must be finite and non-negative".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "carbon price grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn correlation_at<F>(build: &F, c_ghg: f64, weighting: Weighting) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<MeritOrder>,
{
    match merit_order_correlation(&build(c_ghg)?, weighting) {
        Ok(r) => Ok(Some(r.r)),
        Err(Error::UndefinedCorrelation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Find the first sign change of r along the curve and narrow it down by
/// bisection until the bracket is no wider than [`CROSSING_TOLERANCE`].
pub fn locate_zero_crossing<F>(
    points: &[SweepPoint],
    build: &F,
    weighting: Weighting,
) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<MeritOrder>,
{
    for w in points.windows(2) {
        let (Some(ra), Some(rb)) = (w[0].r, w[1].r) else {
            continue;
        };
        if ra == 0.0 {
            return Ok(Some(w[0].c_ghg));
        }
        if rb == 0.0 {
            return Ok(Some(w[1].c_ghg));
        }
        if ra.signum() == rb.signum() {
            continue;
        }
        let (mut lo, mut hi) = (w[0].c_ghg, w[1].c_ghg);
        while hi - lo > CROSSING_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            match correlation_at(build, mid, weighting)? {
                Some(0.0) => return Ok(Some(mid)),
                Some(r) if r.signum() == ra.signum() => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        return Ok(Some(0.5 * (lo + hi)));
    }
    Ok(None)
}

/// Rebuild the merit order at every grid price and record the cost/emission
/// rank correlation. Grid points are evaluated in parallel; the result does
/// not depend on the thread count.
pub fn carbon_price_sweep<F>(build: F, grid: &[f64], weighting: Weighting) -> Result<SweepCurve>
where
    F: Fn(f64) -> Result<MeritOrder> + Sync,
{
    check_grid(grid)?;
    let rs: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&c| correlation_at(&build, c, weighting))
        .collect::<Result<_>>()?;
    let points: Vec<SweepPoint> = grid
        .iter()
        .zip(rs)
        .map(|(&c_ghg, r)| SweepPoint { c_ghg, r })
        .collect();
    let zero_crossing = locate_zero_crossing(&points, &build, weighting)?;
    Ok(SweepCurve {
        points,
        zero_crossing,
    })
}

/// Sweep CSV with columns `c_ghg_eur_t, r` (no shift columns).
pub fn write_sweep_csv<W: Write>(curve: &SweepCurve, sink: W) -> Result<()> {
    let rows: Vec<ShiftSweepRow> = curve
        .points
        .iter()
        .map(|p| ShiftSweepRow {
            c_ghg: p.c_ghg,
            r: p.r,
            changes: ShiftChanges::default(),
        })
        .collect();
    write_shift_sweep_csv(&rows, sink)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSweepRow {
    pub c_ghg: f64,
    pub r: Option<f64>,
    pub changes: ShiftChanges,
}

/// Full recompute per grid price: merit order, hourly series and a shift
/// study under `driver`.
pub fn shift_study_vs_carbon_price(
    source: &MeritOrderSource,
    gen: &GenerationSeries,
    driver: Driver,
    grid: &[f64],
    weighting: Weighting,
) -> Result<Vec<ShiftSweepRow>> {
    check_grid(grid)?;
    grid.par_iter()
        .map(|&c_ghg| {
            let mo = source.build_at(c_ghg)?;
            let r = match merit_order_correlation(&mo, weighting) {
                Ok(r) => Some(r.r),
                Err(Error::UndefinedCorrelation(_)) => None,
                Err(e) => return Err(e),
            };
            let cef = compute_cef_series(&mo, gen, &source.config.with_carbon_price(c_ghg))?;
            let report = run_shift_study(&cef, driver)?;
            Ok(ShiftSweepRow {
                c_ghg,
                r,
                changes: report.changes,
            })
        })
        .collect()
}

/// Sweep CSV: `c_ghg_eur_t, r, dc_pct, dxe_pct, dme_pct`; undefined values
/// are empty cells.
pub fn write_shift_sweep_csv<W: Write>(rows: &[ShiftSweepRow], sink: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(["c_ghg_eur_t", "r", "dc_pct", "dxe_pct", "dme_pct"])?;
    for row in rows {
        wtr.write_record([
            sig6_opt(Some(row.c_ghg)),
            sig6_opt(row.r),
            sig6_opt(row.changes.dc_pct),
            sig6_opt(row.changes.dxe_pct),
            sig6_opt(row.changes.dme_pct),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<sweep>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuel::FuelType;
    use crate::ingest::{FuelParams, PowerPlant};
    use crate::merit_order::build_merit_order_pp;

    fn params_2019() -> FuelParams {
        FuelParams::new()
            .with(FuelType::Gas, 0.25, 26.10)
            .with(FuelType::Coal, 0.34, 14.58)
    }

    fn toy(c: f64) -> Result<MeritOrder> {
        let plants = [
            PowerPlant::new("coal", FuelType::Coal, 100.0, 0.4),
            PowerPlant::new("ccgt", FuelType::GasCc, 100.0, 0.6),
        ];
        build_merit_order_pp(&plants, &params_2019(), c)
    }

    #[test]
    fn grid_parsing_is_inclusive() {
        let g = parse_grid("0:300:5").unwrap();
        assert_eq!(g.len(), 61);
        assert_eq!(g[60], 300.0);
        assert_eq!(parse_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("10:12:5").unwrap(), [10.0]);
        assert!(parse_grid("0:10").is_err());
        assert!(parse_grid("0:10:0").is_err());
        assert!(parse_grid("10:0:1").is_err());
    }

    #[test]
    fn two_plant_crossing_matches_the_break_even_price() {
        // 14.58/0.4 + 0.85 c = 26.10/0.6 + (0.25/0.6) c
        let analytic = (26.10 / 0.6 - 14.58 / 0.4) / (0.34 / 0.4 - 0.25 / 0.6);
        let grid = parse_grid("0:100:10").unwrap();
        let curve = carbon_price_sweep(toy, &grid, Weighting::default()).unwrap();
        assert_eq!(curve.points[0].r, Some(-1.0));
        assert_eq!(curve.points[10].r, Some(1.0));
        let c = curve.zero_crossing.unwrap();
        assert!(
            (c - analytic).abs() <= CROSSING_TOLERANCE,
            "{c} vs {analytic}"
        );
    }

    #[test]
    fn no_crossing_on_a_one_sided_grid() {
        let curve = carbon_price_sweep(toy, &[0.0, 5.0, 10.0], Weighting::default()).unwrap();
        assert_eq!(curve.zero_crossing, None);
        assert!(carbon_price_sweep(toy, &[5.0, 5.0], Weighting::default()).is_err());
        assert!(carbon_price_sweep(toy, &[], Weighting::default()).is_err());
    }

    #[test]
    fn sweep_csv_layout() {
        let curve = carbon_price_sweep(toy, &[0.0, 20.0], Weighting::default()).unwrap();
        let mut out = Vec::new();
        write_sweep_csv(&curve, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "c_ghg_eur_t,r,dc_pct,dxe_pct,dme_pct\n0,-1,,,\n20,1,,,\n"
        );
    }
}
