//! Piecewise-linear merit order from installed capacities: fit efficiency
//! envelopes on a plant list, split gas into combined and open cycle, and
//! compare with the plant-based stack.
//!
//! cargo run --example piecewise_linear

use cefsim::config::Config;
use cefsim::merit_order::{
    build_merit_order_pp, build_merit_order_pwl, EfficiencyEnvelope, Method,
};
use cefsim::synthetic::{reference_params, SyntheticSystem};

fn main() -> cefsim::Result<()> {
    let sys = SyntheticSystem::new("DE", 2019);
    let params = reference_params();

    let fitted = EfficiencyEnvelope::from_regression(&sys.plants);
    println!("fitted efficiency envelopes:");
    for (fuel, b) in &fitted.0 {
        println!("  {fuel:<8} {:.3} .. {:.3}", b.min, b.max);
    }

    let config = Config::bundled();
    let mut scenario = config.scenario("DE", 2019, Method::Pwl, 24.9)?;
    scenario.envelope = fitted;
    let caps = sys.installed_capacity();
    println!("installed capacity: {caps:?}");
    println!("combined-cycle share of gas: {:?}", scenario.k_cc);

    let pwl = build_merit_order_pwl(&caps, &scenario, &params)?;
    let pp = build_merit_order_pp(&sys.plants, &params, 24.9)?;
    println!(
        "PWL: {} virtual plants, {:.0} MW",
        pwl.len(),
        pwl.total_capacity_mw
    );
    println!("PP:  {} plants, {:.0} MW", pp.len(), pp.total_capacity_mw);

    println!("marginal cost along the stack (EUR/MWh):");
    println!("{:>8} {:>8} {:>8}", "MW", "PP", "PWL");
    let mut pos = 500.0;
    while pos < pp.total_capacity_mw.min(pwl.total_capacity_mw) {
        let a = &pp.blocks[pp.block_at(pos)];
        let b = &pwl.blocks[pwl.block_at(pos)];
        println!(
            "{pos:>8.0} {:>8.2} {:>8.2}",
            a.marginal_cost, b.marginal_cost
        );
        pos += 1500.0;
    }
    Ok(())
}
