//! Daily 1 kWh load shifts under price, XEF and MEF signals on a system
//! where cheap lignite is dirtier than the gas above it: following prices
//! lowers cost and grid-mix emissions but raises marginal emissions.
//!
//! cargo run --example load_shift

use cefsim::config::ScenarioConfig;
use cefsim::dispatch::compute_cef_series;
use cefsim::loadshift::{run_shift_study, Driver};
use cefsim::merit_order::{build_merit_order_pp, Method};
use cefsim::synthetic::dilemma_system;

fn main() -> cefsim::Result<()> {
    let (plants, params, gen) = dilemma_system(7)?;
    let mo = build_merit_order_pp(&plants, &params, 0.0)?;
    let scenario = ScenarioConfig::minimal("XX", 2019, Method::Pp, 0.0, 1.0);
    let cef = compute_cef_series(&mo, &gen, &scenario)?;

    let pct = |v: Option<f64>| {
        v.map(|x| format!("{x:+.1}%"))
            .unwrap_or_else(|| "n/a".into())
    };
    println!("{:<6} {:>9} {:>9} {:>9}", "driver", "cost", "XE", "ME");
    for driver in Driver::ALL {
        let r = run_shift_study(&cef, driver)?;
        let mark = |d: Driver| if d == driver { "*" } else { " " };
        println!(
            "{:<6} {:>8}{} {:>8}{} {:>8}{}",
            driver.name(),
            pct(r.changes.dc_pct),
            mark(Driver::Price),
            pct(r.changes.dxe_pct),
            mark(Driver::Xef),
            pct(r.changes.dme_pct),
            mark(Driver::Mef)
        );
        for ((src, sink), n) in &r.fuel_pairs {
            println!("       {src} => {sink}: {n} days");
        }
    }
    println!("* optimized criterion");
    Ok(())
}
