//! Minimizes, writes the orbit file, and exports plot samples of the four
//! bodies. Plot with `gnuplot -p docs/orbit.gp` from the output directory.
//!
//! `cargo run --release --example export_orbit -- [out_dir]`

use std::path::PathBuf;

use supereight::cli::{export_string, ExportFormat, OrbitFile};
use supereight::minimizer::{minimize, RunConfig};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    let cfg = RunConfig {
        k: 24,
        m: 1024,
        seeds: vec![0, 1],
        ..RunConfig::default()
    };
    let best = minimize(&cfg)?.best;
    let file = OrbitFile::from_result(&best);
    file.write(&dir.join("orbit.json"))?;

    // reading back reproduces the file byte for byte
    let again = OrbitFile::read(&dir.join("orbit.json"))?;
    assert_eq!(again.to_json()?, file.to_json()?);

    let x = again.path()?;
    std::fs::write(dir.join("orbit.csv"), export_string(&x, 1024, ExportFormat::Csv)?)?;
    println!("wrote {}/orbit.json and orbit.csv (action {:.10})", dir.display(), best.action.total);
    Ok(())
}
