//! Build a merit order from a plant list and show how the carbon price
//! reorders it.
//!
//! cargo run --example plant_merit_order

use cefsim::merit_order::build_merit_order_pp;
use cefsim::synthetic::{reference_params, SyntheticSystem};

fn main() -> cefsim::Result<()> {
    let sys = SyntheticSystem::new("DE", 2019);
    let params = reference_params();

    for c_ghg in [0.0, 24.9, 100.0] {
        let mo = build_merit_order_pp(&sys.plants, &params, c_ghg)?;
        println!(
            "carbon price {c_ghg} EUR/t, {} MW in {} blocks",
            mo.total_capacity_mw,
            mo.len()
        );
        println!(
            "{:>4} {:<8} {:>9} {:>10} {:>7} {:>8}",
            "rank", "fuel", "MW", "cum MW", "c", "eps"
        );
        for (i, b) in mo.blocks.iter().enumerate() {
            println!(
                "{:>4} {:<8} {:>9.1} {:>10.1} {:>7.2} {:>8.3}",
                i + 1,
                b.fuel.to_string(),
                b.capacity_mw,
                b.cum_capacity_mw,
                b.marginal_cost,
                b.emission_intensity
            );
        }
        println!();
    }

    let mo = build_merit_order_pp(&sys.plants, &params, 24.9)?;
    let mut out = Vec::new();
    mo.write_csv(&mut out)?;
    println!("CSV export, first lines:");
    for line in String::from_utf8_lossy(&out).lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
