//! Validate the piecewise-linear method against the plant-based one: both
//! are built from the same plant list (PWLv) and dispatched against the same
//! year.
//!
//! cargo run --example validate_pwl

use cefsim::analysis::validation_errors;
use cefsim::config::Config;
use cefsim::merit_order::Method;
use cefsim::scenario::{run_scenario, MeritOrderSource};
use cefsim::synthetic::SyntheticSystem;

fn main() -> cefsim::Result<()> {
    let config = Config::bundled();
    let sys = SyntheticSystem::new("DE", 2019);
    let gen = sys.generation()?;

    let source = |method| -> cefsim::Result<MeritOrderSource> {
        let sc = config.scenario("DE", 2019, method, sys.c_ghg)?;
        Ok(MeritOrderSource::new(sc, sys.params.clone()).with_plants(sys.plants.clone()))
    };
    let pp = run_scenario(&source(Method::Pp)?, &gen)?;
    let pwlv = run_scenario(&source(Method::Pwlv)?, &gen)?;
    let report = validation_errors(&pp.merit_order, &pp.cef, &pwlv.merit_order, &pwlv.cef)?;

    println!("relative errors of PWLv against PP, {}:", report.year);
    for (name, value) in report.entries() {
        match value {
            Some(v) => println!("  {name:<13} {v:>7.3} %"),
            None => println!("  {name:<13}     n/a"),
        }
    }
    println!(
        "excluded: {} zero-emission elements, {} zero-MEF hours",
        report.excluded_elements_emission, report.excluded_hours_mef
    );
    Ok(())
}
