//! How the rank correlation between marginal cost and emission intensity
//! along the merit order changes with the carbon price, and where it
//! crosses zero.
//!
//! cargo run --example carbon_price_sweep

use cefsim::analysis::{carbon_price_sweep, parse_grid, Weighting};
use cefsim::ingest::PowerPlant;
use cefsim::merit_order::build_merit_order_pp;
use cefsim::synthetic::reference_params;
use cefsim::FuelType;

fn main() -> cefsim::Result<()> {
    // cheap dirty fuels at the bottom: r starts negative
    let plants = [
        PowerPlant::new("lignite", FuelType::Lignite, 1000.0, 0.40),
        PowerPlant::new("coal", FuelType::Coal, 800.0, 0.42),
        PowerPlant::new("ccgt", FuelType::GasCc, 1000.0, 0.60),
        PowerPlant::new("ocgt", FuelType::Gas, 300.0, 0.35),
    ];
    let params = reference_params();
    let build = |c: f64| build_merit_order_pp(&plants, &params, c);

    let grid = parse_grid("0:150:10")?;
    for weighting in [Weighting::default(), Weighting::PerBlock] {
        let curve = carbon_price_sweep(build, &grid, weighting)?;
        println!("{weighting:?}");
        for p in &curve.points {
            let r =
                p.r.map(|r| format!("{r:+.3}"))
                    .unwrap_or_else(|| "undefined".into());
            println!("  {:>5} EUR/t  r = {r}", p.c_ghg);
        }
        match curve.zero_crossing {
            Some(c) => println!("  r crosses zero at {c:.2} EUR/t"),
            None => println!("  r does not cross zero on this grid"),
        }
    }
    Ok(())
}
