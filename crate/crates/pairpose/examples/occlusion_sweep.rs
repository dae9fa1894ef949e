//! A small in-process benchmark sweep over occlusion levels.
//!
//! The same machinery backs the `pairpose sweep` command, which reads
//! the config from a file and writes `report.csv` and `aggregates.json`;
//! here everything stays in memory and the aggregate table goes to
//! stdout. Sized down to finish in seconds; the checked-in
//! `configs/default.toml` runs the full 200-scenes-per-level version.

use pairpose::metrics::MetricConfig;
use pairpose::sim::{run_sweep, Method, ScenarioConfig, SweepConfig, SweepVariable};

fn main() {
    let config = SweepConfig {
        sweep: SweepVariable::Occlusion,
        values: vec![0.0, 0.3, 0.6],
        scenes_per_value: 20,
        methods: vec![Method::Bico, Method::BcmSOnly, Method::Kabsch],
        scenario: ScenarioConfig {
            seed: 0,
            model_points: 400,
            scene_points: 400,
            corr_noise_sigma: 0.002,
            z: 60,
            ..ScenarioConfig::default()
        },
        metrics: MetricConfig::default(),
    };

    let report = run_sweep(&config).expect("config is valid");
    print!("{}", report.render_table());

    let perfect = report
        .aggregates
        .iter()
        .filter(|a| a.failures == 0)
        .count();
    println!(
        "{} of {} cells completed every scene; {} rows written",
        perfect,
        report.aggregates.len(),
        report.records.len()
    );
}
