//! Random fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use cefsim::dispatch::{CefHour, CefSeries};
use cefsim::ingest::{FuelParams, GenerationSeries, PowerPlant};
use cefsim::merit_order::{DispatchBlock, MeritOrder, Method};
use cefsim::FuelType;
use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DISPATCHABLE: [FuelType; 6] = [
    FuelType::Nuclear,
    FuelType::Lignite,
    FuelType::Coal,
    FuelType::Gas,
    FuelType::GasCc,
    FuelType::Oil,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn hours_from(date: NaiveDate, n: usize) -> Vec<NaiveDateTime> {
    let t0 = date.and_hms_opt(0, 0, 0).unwrap();
    (0..n as i64).map(|h| t0 + Duration::hours(h)).collect()
}

/// Fuel parameters with random prices and emission factors (nuclear clean).
pub fn random_params(rng: &mut ChaCha8Rng) -> FuelParams {
    DISPATCHABLE.iter().fold(FuelParams::new(), |p, &f| {
        let eps = if f == FuelType::Nuclear {
            0.0
        } else {
            rng.gen_range(0.2..0.45)
        };
        p.with(f, eps, rng.gen_range(2.0..60.0))
    })
}

pub fn random_plants(rng: &mut ChaCha8Rng, n: usize, fuels: &[FuelType]) -> Vec<PowerPlant> {
    (0..n)
        .map(|i| {
            let fuel = fuels[rng.gen_range(0..fuels.len())];
            PowerPlant::new(
                format!("p{i}"),
                fuel,
                rng.gen_range(10.0..900.0),
                rng.gen_range(0.25..0.62),
            )
        })
        .collect()
}

/// Emissions of explicitly dispatched plants: fill the stack in order, each
/// plant producing what is left up to its capacity. Returns the emission
/// intensity of total generation and the dispatched power.
pub fn brute_force_dispatch(
    mo: &MeritOrder,
    resid: f64,
    total_generation_mwh: f64,
    eta_t: f64,
    dt_hours: f64,
) -> (f64, f64) {
    let mut left = resid;
    let (mut emissions, mut dispatched) = (0.0, 0.0);
    for b in &mo.blocks {
        let out = left.min(b.capacity_mw).max(0.0);
        left -= out;
        emissions += b.emission_intensity * out * dt_hours;
        dispatched += out;
    }
    (emissions / (eta_t * total_generation_mwh), dispatched)
}

/// Random hourly generation with the given fuels plus wind and solar.
pub fn random_generation(
    rng: &mut ChaCha8Rng,
    hours: usize,
    fuels: &[FuelType],
    max_mw: f64,
) -> GenerationSeries {
    let index = hours_from(NaiveDate::from_ymd_opt(2019, 5, 1).unwrap(), hours);
    let mut gen = GenerationSeries::new("ZZ", 2019, index);
    let mut cols: Vec<FuelType> = fuels.to_vec();
    cols.extend([FuelType::WindOnshore, FuelType::Solar]);
    cols.sort();
    cols.dedup();
    for f in cols {
        let values = (0..hours)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    0.0
                } else {
                    rng.gen_range(0.0..max_mw)
                }
            })
            .collect();
        gen = gen.with_column(f, values);
    }
    gen
}

/// A series of complete days with independent random signals. MEF and XEF
/// are non-negative.
pub fn random_cef(rng: &mut ChaCha8Rng, days: usize) -> CefSeries {
    let n = days * 24;
    let fuels = [
        FuelType::Lignite,
        FuelType::Coal,
        FuelType::GasCc,
        FuelType::Gas,
    ];
    CefSeries {
        country: "ZZ".into(),
        year: 2019,
        method: Method::Pp,
        c_ghg: 0.0,
        index: hours_from(NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(), n),
        hours: (0..n)
            .map(|_| CefHour {
                residual_load_mw: rng.gen_range(0.0..1000.0),
                marginal_fuel: fuels[rng.gen_range(0..fuels.len())],
                marginal_cost: rng.gen_range(-10.0..120.0),
                mef: rng.gen_range(0.0..1.3),
                xef: Some(rng.gen_range(0.0..0.9)),
                saturated: false,
            })
            .collect(),
        warnings: vec![],
    }
}

/// For one day of values, the smallest `v[sink] - v[source]` over all pairs
/// of distinct hours, with the pair.
pub fn best_pair(day: &[f64]) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for s in 0..day.len() {
        for k in 0..day.len() {
            if s != k && day[k] - day[s] < best.2 {
                best = (s, k, day[k] - day[s]);
            }
        }
    }
    best
}

/// A merit order built directly from blocks in the given order.
pub fn stack_of(blocks: &[(FuelType, f64, f64, f64)]) -> MeritOrder {
    let mut cum = 0.0;
    let blocks = blocks
        .iter()
        .enumerate()
        .map(|(i, &(fuel, cap, cost, eps))| {
            cum += cap;
            DispatchBlock {
                id: format!("b{i}"),
                fuel,
                capacity_mw: cap,
                efficiency: 0.4,
                marginal_cost: cost,
                emission_intensity: eps,
                cum_capacity_mw: cum,
            }
        })
        .collect();
    let mut mo = MeritOrder::from_plants(
        &[PowerPlant::new("x", FuelType::Coal, 1.0, 0.4)],
        &FuelParams::new().with(FuelType::Coal, 0.3, 10.0),
        0.0,
        Method::Pp,
    )
    .unwrap();
    mo.blocks = blocks;
    mo.total_capacity_mw = cum;
    mo
}
