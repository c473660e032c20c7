//! A reduced power study: both tests against scale-5 mixture contamination,
//! printed as a table. The full-size grid (1000 replications, 10^6 draws) runs
//! through the `forward-scatter power` subcommand.
//!
//! Run with: cargo run --release --example power_study

use forward_scatter::harness::{run_power_study, ExperimentConfig, Scenario};
use forward_scatter::rng::RngSeed;

fn main() -> forward_scatter::Result<()> {
    let cfg = ExperimentConfig {
        reps: 200,
        mc_draws: 100_000,
        betas: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
        master_seed: RngSeed(2024),
        ..ExperimentConfig::new(Scenario::GaussianGaussian)
    };
    let (table, manifest) = run_power_study(&cfg)?;

    println!(
        "scenario {} — n = {}, reps = {}, gamma = {}, alpha = {}",
        cfg.scenario.label(),
        cfg.n,
        cfg.reps,
        cfg.gamma,
        cfg.alpha
    );
    println!("{:<6} {:>6} {:>10} {:>10}", "test", "beta", "power", "se");
    for row in &table.rows {
        println!(
            "{:<6} {:>6} {:>10.3} {:>10.3}",
            row.test.label(),
            row.beta,
            row.power,
            row.se
        );
    }
    println!(
        "config hash {} — wall clock {:.1}s",
        manifest.config_hash, manifest.wall_clock_seconds
    );
    Ok(())
}
