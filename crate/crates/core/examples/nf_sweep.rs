//! Sweeps the commit count over 3..=9 on a noisy scenario and prints the
//! statistics table.
//!
//! cargo run --release --example nf_sweep -- [seed]

use trajmap::evaluator::{format_table, DEFAULT_MATCH_THRESHOLD};
use trajmap::pipeline::{sweep, Sequence};
use trajmap::simulator::{generate, ScenarioConfig};
use trajmap::stabilizer::StabilizationConfig;
use trajmap::tracker::TrackerConfig;

fn main() -> trajmap::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(42);
    let scenario = generate(&ScenarioConfig::noisy(seed))?;
    let report = sweep(
        &Sequence::from_scenario(&scenario),
        &scenario.ground_truth,
        &StabilizationConfig::default(),
        &TrackerConfig::default(),
        DEFAULT_MATCH_THRESHOLD,
    )?;
    println!("seed {seed}, {} pellets", scenario.ground_truth.len());
    print!("{}", format_table(&report));
    Ok(())
}
