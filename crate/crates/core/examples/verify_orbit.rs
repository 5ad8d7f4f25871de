//! Minimizes at a modest truncation and checks the loop against direct
//! integration of Newton's equations.
//!
//! `cargo run --release --example verify_orbit -- [k] [M]`

use supereight::minimizer::{minimize, RunConfig};
use supereight::verify::residual_report;

fn main() -> anyhow::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let cfg = RunConfig {
        k: args.first().copied().unwrap_or(32),
        m: args.get(1).copied().unwrap_or(2048),
        seeds: vec![0],
        ..RunConfig::default()
    };
    let orbit = minimize(&cfg)?.best;
    println!("k = {}, M = {}, action {:.12}", cfg.k, cfg.m, orbit.action.total);
    let rep = residual_report(&orbit, 1e-12)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(())
}
