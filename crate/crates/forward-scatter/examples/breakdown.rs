//! Probe the empirical breakdown fraction of the forward-search estimator at
//! two trimming levels; the estimator should resist up to a 1 − gamma fraction
//! of arbitrarily placed outliers.
//!
//! Run with: cargo run --release --example breakdown

use forward_scatter::harness::{run_breakdown_study, BreakdownConfig};
use forward_scatter::rng::RngSeed;

fn main() -> forward_scatter::Result<()> {
    for gamma in [0.5, 0.75] {
        let cfg = BreakdownConfig {
            gamma,
            master_seed: RngSeed(55),
            ..BreakdownConfig::new()
        };
        let report = run_breakdown_study(&cfg)?;
        println!(
            "gamma = {gamma}: estimated breakdown fraction {:.3} (theory: 1 - gamma = {:.2})",
            report.estimated_breakdown_fraction,
            1.0 - gamma
        );
        for cell in report.cells.iter().filter(|c| (c.fraction - (1.0 - gamma)).abs() < 0.04) {
            println!(
                "  fraction {:.3} (n* = {:>2}): sup divergence {:>12.4e}  exploded = {}",
                cell.fraction, cell.n_star, cell.divergence, cell.exploded
            );
        }
    }
    Ok(())
}
