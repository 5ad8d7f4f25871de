//! Multi-start minimization at a chosen truncation.
//!
//! `cargo run --release --example minimize_super_eight -- [k] [M] [seeds]`

use supereight::minimizer::{minimize, RunConfig, StartStatus};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: usize| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let cfg = RunConfig {
        k: arg(0, 16),
        m: arg(1, 512),
        seeds: (0..arg(2, 4) as u64).collect(),
        ..RunConfig::default()
    };
    let t = std::time::Instant::now();
    let report = minimize(&cfg)?;
    for s in &report.starts {
        let a = s.result.as_ref().map(|r| r.action.total);
        let iters = s.trace.len();
        println!("seed {:>2}: {:?} action {:?} ({} iterations)", s.seed, s.status, a, iters);
    }
    for b in &report.basins {
        println!("basin {:.10} seeds {:?}", b.action, b.seeds);
    }
    let best = &report.best;
    println!("best action      {:.12}", best.action.total);
    println!("min separation   {:.6}", best.min_separation);
    println!("grad norm        {:.3e}", best.grad_norm);
    println!("omega signs      {:?}", best.omega_signs);
    println!("converged        {}", best.converged);
    println!("elapsed          {:.1?}", t.elapsed());
    if report.starts.iter().all(|s| s.status != StartStatus::Converged) {
        std::process::exit(2);
    }
    Ok(())
}
