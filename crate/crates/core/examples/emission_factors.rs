//! Hourly marginal (MEF) and grid-mix (XEF) emission factors and marginal
//! prices for a synthetic year.
//!
//! cargo run --example emission_factors

use cefsim::config::Config;
use cefsim::dispatch::compute_cef_series;
use cefsim::merit_order::Method;
use cefsim::synthetic::SyntheticSystem;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn main() -> cefsim::Result<()> {
    let sys = SyntheticSystem::new("DE", 2019);
    let gen = sys.generation()?;
    let mo = sys.merit_order()?;
    let scenario = Config::bundled().scenario("DE", 2019, Method::Pp, sys.c_ghg)?;
    let cef = compute_cef_series(&mo, &gen, &scenario)?;

    let mef = cef.mefs();
    let xef: Vec<f64> = cef.xefs().into_iter().flatten().collect();
    let below = cef
        .hours
        .iter()
        .filter(|h| h.xef.is_some_and(|x| x < h.mef))
        .count();
    println!("hours: {}", cef.len());
    println!(
        "median MEF {:.3} t/MWh, median XEF {:.3} t/MWh",
        median(mef),
        median(xef)
    );
    println!("XEF below MEF in {below} hours");
    println!("median price {:.2} EUR/MWh", median(cef.prices()));
    println!(
        "saturated hours: {}, invalid hours: {}",
        cef.saturated_hours(),
        cef.invalid_hours()
    );

    println!("first day:");
    println!(
        "{:>19} {:>9} {:<8} {:>7} {:>6} {:>6}",
        "timestamp", "resid MW", "fuel", "price", "MEF", "XEF"
    );
    for (ts, h) in cef.index.iter().zip(&cef.hours).take(24) {
        println!(
            "{ts} {:>9.0} {:<8} {:>7.2} {:>6.3} {:>6.3}",
            h.residual_load_mw,
            h.marginal_fuel.to_string(),
            h.marginal_cost,
            h.mef,
            h.xef.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
