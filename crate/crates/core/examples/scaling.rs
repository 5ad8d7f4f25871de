//! Blow-up scaling trajectories and their limiting ejection angles.
//!
//! `cargo run --release --example scaling`

use supereight::collision::{integrate_scaling, theta_asymptote, y_infinity, Branch};

fn main() -> anyhow::Result<()> {
    println!("{:>5} {:>7} {:>14} {:>14} {:>14} {:>10}", "d", "branch", "theta(1e3)", "extrapolated", "closed form", "drift");
    for d in [0.0, 0.5, 1.0, 2.0, 5.0] {
        for branch in [Branch::Plus, Branch::Minus] {
            let tr = integrate_scaling(d, branch, 1e3, 1e-12)?;
            println!(
                "{d:>5} {branch:>7} {:>14.8} {:>14.8} {:>14.8} {:>10.1e}",
                tr.final_theta(),
                tr.extrapolated_theta()?,
                theta_asymptote(d, branch),
                tr.energy_drift
            );
        }
    }
    let y = y_infinity(0.5, Branch::Plus);
    println!("d -> inf limit at s = 0.5: ({:.6}, {:.6})", y[0], y[1]);
    Ok(())
}
