//! Normalize a raw quarter-hourly generation file: resample to hours, screen
//! for outliers, fill gaps and print the fill report.
//!
//! cargo run --example ingest_raw_data

use cefsim::config::Config;
use cefsim::ingest::{
    detect_outliers_zscore, fill_missing, parse_generation_csv, resample_hourly, FillKind,
    GenerationSchema,
};
use cefsim::synthetic::{write_raw_dataset, RawOptions, SyntheticSystem};
use cefsim::FuelType;

fn main() -> cefsim::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    // one missing solar value and one absurd wind reading
    let opts = RawOptions {
        quarter_hourly: true,
        gaps: vec![("DE".into(), 12, FuelType::Solar)],
        spikes: vec![("DE".into(), 100, FuelType::WindOnshore, 1.0e6)],
    };
    write_raw_dataset(dir.path(), &[SyntheticSystem::new("DE", 2019)], &opts)?;

    let config = Config::bundled();
    let schema = GenerationSchema {
        timestamp_column: None,
        names: config.fuel_names(),
    };
    let file = std::fs::File::open(dir.path().join("generation/DE_2019.csv")).expect("raw file");
    let raw = parse_generation_csv(file, &schema, "DE", 2019)?;
    println!(
        "raw: {} rows at {} min resolution",
        raw.len(),
        raw.resolution_minutes
    );

    let mut hourly = resample_hourly(&raw)?;
    let flags = detect_outliers_zscore(&mut hourly, config.zscore_threshold)?;
    for f in &flags {
        println!(
            "outlier: {} {} = {} (z = {:.1})",
            f.timestamp, f.fuel, f.value, f.zscore
        );
    }
    let filled = fill_missing(hourly);
    println!(
        "hourly: {} rows, complete: {}",
        filled.len(),
        filled.is_complete()
    );
    println!("fill fraction: {:.5}", filled.fill_fraction());
    for rec in &filled.fill_report {
        if rec.kind != FillKind::Outlier {
            println!(
                "filled: {} {} ({})",
                rec.timestamp,
                rec.fuel,
                rec.kind.as_str()
            );
        }
    }
    for w in &filled.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
