//! The rotating square: an exact periodic solution inside the loop space,
//! used as a regression target for the gradient and the integrator.
//!
//! `cargo run --release --example rotating_square`

use supereight::action::LoopFunctional;
use supereight::symmetry::{boundary_residual, group};
use supereight::verify::{loop_residuals, rotating_square, rotating_square_radius};

fn main() -> anyhow::Result<()> {
    let k = 16;
    let x = rotating_square(k)?;
    let f = LoopFunctional::new(k, 512)?;
    let g = group().project(&f.gradient(&x, 0.0)?);
    println!("radius R = {:.12} (R^3 = {:.12})", rotating_square_radius(), rotating_square_radius().powi(3));
    println!("segment action {:.12}", f.segment_action(&x, 0.0)?.total);
    println!("projected gradient norm {:.3e}", g.h1_norm());
    println!("omega signs {:?}", boundary_residual(&x).omega_signs());
    let rep = loop_residuals(&x, 1e-12)?;
    println!("newton_sup {:.3e}, energy drift {:.3e}, periodicity {:.3e}", rep.newton_sup, rep.energy_drift, rep.periodicity);
    Ok(())
}
