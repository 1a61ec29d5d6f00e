//! The whole command-line pipeline driven from code: raw files for two
//! countries are ingested, dispatched with all three methods, and studied.
//! Equivalent to running `cefsim ingest`, `compute`, `shift`, `sweep` and
//! `validate` in turn.
//!
//! cargo run --example batch_pipeline

use cefsim::cli::{
    cmd_compute, cmd_ingest, cmd_shift, cmd_sweep, cmd_validate, ComputeArgs, IngestArgs, Selector,
    ShiftArgs, SweepArgs, ValidateArgs,
};
use cefsim::config::Config;
use cefsim::loadshift::Driver;
use cefsim::merit_order::Method;
use cefsim::synthetic::{write_raw_dataset, RawOptions, SyntheticSystem};

fn main() -> cefsim::Result<()> {
    let root = tempfile::tempdir().expect("temp dir");
    let (raw, norm, out) = (
        root.path().join("raw"),
        root.path().join("norm"),
        root.path().join("out"),
    );
    let systems = [
        SyntheticSystem::new("DE", 2019),
        SyntheticSystem::new("PL", 2019),
    ];
    write_raw_dataset(&raw, &systems, &RawOptions::default())?;

    let config = Config::bundled();
    let all = Selector::default();
    let jobs = 0;
    let steps = [
        (
            "ingest",
            cmd_ingest(
                &config,
                &raw,
                &norm,
                jobs,
                &IngestArgs {
                    select: all.clone(),
                },
            )?,
        ),
        (
            "compute",
            cmd_compute(
                &config,
                &norm,
                &out,
                jobs,
                &ComputeArgs {
                    select: all.clone(),
                    method: vec![Method::Pp, Method::Pwl, Method::Pwlv],
                    carbon_price: None,
                },
            )?,
        ),
        (
            "shift",
            cmd_shift(
                &config,
                &norm,
                &out,
                jobs,
                &ShiftArgs {
                    select: all.clone(),
                    method: vec![Method::Pp],
                    driver: Driver::ALL.to_vec(),
                    carbon_price: None,
                    shift_kwh: 1.0,
                },
            )?,
        ),
        (
            "sweep",
            cmd_sweep(
                &config,
                &norm,
                &out,
                jobs,
                &SweepArgs {
                    select: all.clone(),
                    method: vec![Method::Pp],
                    cghg_grid: "0:200:10".into(),
                    driver: None,
                    per_block: false,
                },
            )?,
        ),
        (
            "validate",
            cmd_validate(
                &config,
                &norm,
                &out,
                jobs,
                &ValidateArgs {
                    select: all,
                    carbon_price: None,
                },
            )?,
        ),
    ];
    for (name, outcome) in &steps {
        let ok = outcome
            .manifest
            .scenarios
            .iter()
            .filter(|s| s.status == "ok")
            .count();
        println!(
            "{name:<8} exit {}  {ok}/{} scenarios ok, {} files written",
            outcome.exit_code,
            outcome.manifest.scenarios.len(),
            outcome.manifest.outputs.len()
        );
    }
    let summary =
        std::fs::read_to_string(out.join("shift/DE_2019_pp_price_summary.txt")).expect("summary");
    println!("\nshift/DE_2019_pp_price_summary.txt:\n{summary}");
    Ok(())
}
