//! Property tests for the invariants of each stage.

mod common;

use cefsim::analysis::{merit_order_correlation, spearman, validation_errors, Weighting};
use cefsim::config::{Config, ScenarioConfig};
use cefsim::dispatch::{compute_cef_series, marginal_block, mef_at, utilization, xef_at};
use cefsim::ingest::{
    detect_outliers_zscore, fill_missing, parse_generation_csv, resample_hourly,
    write_generation_csv, GenerationSchema, GenerationSeries,
};
use cefsim::loadshift::{
    daily_shift_events, driver_signal, evaluate_shifts, run_shift_study, Driver,
};
use cefsim::merit_order::{build_merit_order_pp, Method};
use cefsim::synthetic::year_index;
use cefsim::FuelType;
use chrono::Duration;
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn capacity_is_conserved(seed in seeds(), n in 1usize..30, c in 0.0f64..300.0) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = random_plants(&mut rng, n, &DISPATCHABLE);
        let mo = build_merit_order_pp(&plants, &params, c).unwrap();
        let input: f64 = plants.iter().map(|p| p.capacity_mw).sum();
        prop_assert!((mo.total_capacity_mw - input).abs() <= 1e-9 * input);
        prop_assert_eq!(mo.len(), n);
        prop_assert!(mo.blocks.windows(2).all(|w| w[0].marginal_cost <= w[1].marginal_cost));
    }

    #[test]
    fn common_price_scaling_keeps_the_order(seed in seeds(), n in 2usize..20, k in 0.1f64..10.0) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = random_plants(&mut rng, n, &DISPATCHABLE);
        let ids = |p| -> Vec<String> {
            build_merit_order_pp(&plants, &p, 0.0).unwrap().blocks.into_iter().map(|b| b.id).collect()
        };
        prop_assert_eq!(ids(params.clone()), ids(params.scale_prices(k)));
    }

    #[test]
    fn carbon_widens_gaps_towards_dirtier_plants(seed in seeds(), c1 in 0.0f64..200.0, dc in 0.0f64..200.0) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = random_plants(&mut rng, 8, &DISPATCHABLE);
        let at = |c| {
            let mo = build_merit_order_pp(&plants, &params, c).unwrap();
            let mut v: Vec<_> = mo.blocks.into_iter().map(|b| (b.id, b.marginal_cost, b.emission_intensity)).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v
        };
        let (lo, hi) = (at(c1), at(c1 + dc));
        for a in 0..lo.len() {
            for b in 0..lo.len() {
                if lo[a].2 > lo[b].2 {
                    let grow = (hi[a].1 - hi[b].1) - (lo[a].1 - lo[b].1);
                    prop_assert!(grow >= -1e-9, "{grow}");
                }
            }
        }
    }

    #[test]
    fn dispatch_serves_the_residual_load(seed in seeds(), resid_frac in 0.0f64..1.5) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = { let n = rng.gen_range(1..10); random_plants(&mut rng, n, &DISPATCHABLE) };
        let mo = build_merit_order_pp(&plants, &params, 30.0).unwrap();
        let resid = resid_frac * mo.total_capacity_mw;
        let u = utilization(&mo, resid).unwrap();
        let served: f64 = u.gamma.iter().zip(&mo.blocks).map(|(g, b)| g * b.capacity_mw).sum();
        let expected = resid.min(mo.total_capacity_mw);
        prop_assert!((served - expected).abs() <= 1e-12 * expected.max(1.0));
        prop_assert!(u.gamma.iter().all(|g| (0.0..=1.0).contains(g)));
        prop_assert_eq!(u.saturated, resid > mo.total_capacity_mw);
    }

    #[test]
    fn mef_is_the_marginal_block_intensity(seed in seeds(), resid_frac in 0.0f64..1.2, eta in 0.5f64..1.0) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = { let n = rng.gen_range(1..10); random_plants(&mut rng, n, &DISPATCHABLE) };
        let mo = build_merit_order_pp(&plants, &params, 30.0).unwrap();
        let resid = resid_frac * mo.total_capacity_mw;
        let m = marginal_block(&mo, resid).unwrap();
        prop_assert_eq!(mef_at(&mo, resid, eta).unwrap(), mo.blocks[m.index].emission_intensity / eta);
        let start = mo.start_of(m.index);
        if !m.saturated && resid > 0.0 {
            prop_assert!(start < resid && resid <= mo.blocks[m.index].cum_capacity_mw);
        }
    }

    #[test]
    fn doubling_transmission_efficiency_halves_factors(seed in seeds(), resid_frac in 0.01f64..1.0, eta in 0.2f64..0.5) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = { let n = rng.gen_range(1..8); random_plants(&mut rng, n, &DISPATCHABLE) };
        let mo = build_merit_order_pp(&plants, &params, 10.0).unwrap();
        let resid = resid_frac * mo.total_capacity_mw;
        let total = resid * 1.3;
        let (m1, m2) = (mef_at(&mo, resid, eta).unwrap(), mef_at(&mo, resid, 2.0 * eta).unwrap());
        let (x1, x2) = (xef_at(&mo, resid, total, eta, 1.0).unwrap(), xef_at(&mo, resid, total, 2.0 * eta, 1.0).unwrap());
        prop_assert!((m1 - 2.0 * m2).abs() <= 1e-12 * m1.max(1e-300));
        prop_assert!((x1 - 2.0 * x2).abs() <= 1e-12 * x1.max(1e-300));
    }

    #[test]
    fn spearman_ignores_monotone_transforms(xs in prop::collection::vec(-1e3f64..1e3, 3..40), seed in seeds()) {
        let mut rng = rng(seed);
        let ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(-5.0..5.0)).collect();
        let base = spearman(&xs, &ys);
        let tx: Vec<f64> = xs.iter().map(|x| x * x * x + 7.0).collect();
        let ty: Vec<f64> = ys.iter().map(|y| (y / 3.0).exp()).collect();
        match base {
            Ok(r) => {
                prop_assert!((-1.0..=1.0).contains(&r.r));
                prop_assert_eq!(spearman(&tx, &ty).unwrap().r, r.r);
            }
            Err(_) => prop_assert!(spearman(&tx, &ty).is_err()),
        }
    }

    #[test]
    fn merit_order_correlation_is_bounded(seed in seeds(), c in 0.0f64..500.0, per_block in any::<bool>()) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let plants = { let n = rng.gen_range(2..20); random_plants(&mut rng, n, &DISPATCHABLE) };
        let mo = build_merit_order_pp(&plants, &params, c).unwrap();
        let w = if per_block { Weighting::PerBlock } else { Weighting::default() };
        if let Ok(r) = merit_order_correlation(&mo, w) {
            prop_assert!((-1.0..=1.0).contains(&r.r));
        }
    }

    #[test]
    fn validation_is_reflexive_and_ignores_plant_order(seed in seeds()) {
        let mut rng = rng(seed);
        let params = random_params(&mut rng);
        let mut plants = { let n = rng.gen_range(2..10); random_plants(&mut rng, n, &DISPATCHABLE) };
        let fuels: Vec<FuelType> = plants.iter().map(|p| p.fuel).collect();
        let mo = build_merit_order_pp(&plants, &params, 20.0).unwrap();
        let mut gen = random_generation(&mut rng, 48, &fuels, mo.total_capacity_mw / fuels.len() as f64);
        gen.country = "ZZ".into();
        let sc = ScenarioConfig::minimal("ZZ", 2019, Method::Pp, 20.0, 0.95);
        let cef = compute_cef_series(&mo, &gen, &sc).unwrap();
        let same = validation_errors(&mo, &cef, &mo, &cef).unwrap();
        prop_assert!(same.entries().iter().all(|(_, v)| v.is_none_or(|v| v == 0.0)));

        // relabel and reorder the plants: only the capacity curves matter
        plants.shuffle(&mut rng);
        for (i, p) in plants.iter_mut().enumerate() {
            p.id = format!("q{i}");
        }
        let mo2 = build_merit_order_pp(&plants, &params, 20.0).unwrap();
        let rep = validation_errors(&mo, &cef, &mo2, &cef).unwrap();
        prop_assert_eq!(rep.mo_cost.unwrap_or(0.0), 0.0);
        prop_assert_eq!(rep.mo_emission.unwrap_or(0.0), 0.0);
    }

    #[test]
    fn daily_choice_is_the_best_single_shift(seed in seeds(), days in 1usize..20) {
        let mut rng = rng(seed);
        let cef = random_cef(&mut rng, days);
        for driver in Driver::ALL {
            let signal = driver_signal(&cef, driver);
            let choices = daily_shift_events(&cef.index, &signal).unwrap();
            prop_assert_eq!(choices.choices.len(), days);
            let v: Vec<f64> = signal.iter().map(|s| s.unwrap()).collect();
            for (d, c) in choices.choices.iter().enumerate() {
                let (_, _, best) = best_pair(&v[d * 24..d * 24 + 24]);
                prop_assert_eq!(v[c.sink] - v[c.source], best);
            }
        }
    }

    #[test]
    fn mef_driver_never_loses_on_marginal_emissions(seed in seeds(), days in 1usize..40) {
        let mut rng = rng(seed);
        let cef = random_cef(&mut rng, days);
        let dme = |d| run_shift_study(&cef, d).unwrap().changes.dme_pct.unwrap();
        let m = dme(Driver::Mef);
        prop_assert!(m <= dme(Driver::Price) + 1e-12);
        prop_assert!(m <= dme(Driver::Xef) + 1e-12);
        prop_assert!(m >= -100.0);
    }

    #[test]
    fn shift_report_matches_the_series(seed in seeds(), days in 1usize..20) {
        let mut rng = rng(seed);
        let cef = random_cef(&mut rng, days);
        let report = run_shift_study(&cef, Driver::Price).unwrap();
        let t0 = cef.index[0];
        let pos = |e: &cefsim::loadshift::ShiftEvent, h: u32| {
            ((e.date.and_hms_opt(h, 0, 0).unwrap() - t0).num_hours()) as usize
        };
        for e in &report.events {
            prop_assert_eq!(e.source_fuel, cef.hours[pos(e, e.source_hour)].marginal_fuel);
            prop_assert_eq!(e.sink_fuel, cef.hours[pos(e, e.sink_hour)].marginal_fuel);
            prop_assert_eq!(e.mef.source, cef.hours[pos(e, e.source_hour)].mef);
        }
        let pairs: usize = report.fuel_pairs.values().sum();
        prop_assert_eq!(pairs, report.events.len());
        prop_assert_eq!(report.source_hours.iter().sum::<usize>(), report.events.len());
    }

    #[test]
    fn evaluation_ignores_event_order(seed in seeds(), days in 2usize..30) {
        let mut rng = rng(seed);
        let cef = random_cef(&mut rng, days);
        let mut events = run_shift_study(&cef, Driver::Xef).unwrap().events;
        let a = evaluate_shifts(&events);
        events.shuffle(&mut rng);
        let b = evaluate_shifts(&events);
        for d in Driver::ALL {
            let (x, y) = (a.get(d).unwrap(), b.get(d).unwrap());
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}

fn quarter_hourly_year(rng: &mut rand_chacha::ChaCha8Rng, gaps: usize) -> GenerationSeries {
    let start = year_index(2019)[0];
    let index: Vec<_> = (0..8760 * 4)
        .map(|i| start + Duration::minutes(15 * i))
        .collect();
    let mut s = GenerationSeries::new("ZZ", 2019, index);
    s.resolution_minutes = 15;
    for f in [FuelType::Coal, FuelType::Solar, FuelType::GasCc] {
        let mut col: Vec<Option<f64>> = (0..8760 * 4)
            .map(|_| Some(rng.gen_range(0.0..5000.0)))
            .collect();
        for _ in 0..gaps {
            // whole hours so every bin keeps at least one value unless all four go
            let h = rng.gen_range(0..8760);
            for q in 0..4 {
                col[h * 4 + q] = None;
            }
        }
        s.columns.insert(f, col);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn resampling_conserves_mean_power(seed in seeds()) {
        let mut rng = rng(seed);
        let raw = quarter_hourly_year(&mut rng, 0);
        let hourly = resample_hourly(&raw).unwrap();
        prop_assert_eq!(hourly.len(), 8760);
        for (f, col) in &raw.columns {
            let m_raw = col.iter().map(|v| v.unwrap()).sum::<f64>() / col.len() as f64;
            let h = &hourly.columns[f];
            let m_h = h.iter().map(|v| v.unwrap()).sum::<f64>() / h.len() as f64;
            prop_assert!((m_raw - m_h).abs() <= 1e-9 * m_raw.abs());
        }
    }

    #[test]
    fn filling_leaves_no_gaps_and_reports_each(seed in seeds(), gaps in 1usize..40) {
        let mut rng = rng(seed);
        let hourly = resample_hourly(&quarter_hourly_year(&mut rng, gaps)).unwrap();
        let missing: Vec<(usize, FuelType)> = hourly
            .columns
            .iter()
            .flat_map(|(f, c)| c.iter().enumerate().filter(|(_, v)| v.is_none()).map(move |(i, _)| (i, *f)))
            .collect();
        let filled = fill_missing(hourly);
        prop_assert!(filled.is_complete());
        let reported = filled.filled_positions();
        for m in &missing {
            prop_assert!(reported.contains(m), "{m:?} not reported");
        }
    }

    #[test]
    fn outlier_screen_is_idempotent(seed in seeds()) {
        let mut rng = rng(seed);
        let mut hourly = resample_hourly(&quarter_hourly_year(&mut rng, 0)).unwrap();
        let col = hourly.columns.get_mut(&FuelType::Coal).unwrap();
        col[100] = Some(1e9);
        let first = detect_outliers_zscore(&mut hourly, 12.0).unwrap();
        prop_assert_eq!(first.len(), 1);
        let mut refilled = fill_missing(hourly);
        let again = detect_outliers_zscore(&mut refilled, 12.0).unwrap();
        prop_assert!(again.is_empty());
    }

    #[test]
    fn generation_csv_round_trips(seed in seeds()) {
        let mut rng = rng(seed);
        let hourly = fill_missing(resample_hourly(&quarter_hourly_year(&mut rng, 0)).unwrap());
        let mut out = Vec::new();
        write_generation_csv(&hourly, &mut out).unwrap();
        let schema = GenerationSchema { timestamp_column: None, names: Config::bundled().fuel_names() };
        let back = parse_generation_csv(out.as_slice(), &schema, "ZZ", 2019).unwrap();
        prop_assert_eq!(&back.index, &hourly.index);
        prop_assert_eq!(&back.columns, &hourly.columns);
        let mut again = Vec::new();
        write_generation_csv(&back, &mut again).unwrap();
        prop_assert_eq!(out, again);
    }
}
