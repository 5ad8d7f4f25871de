//! Collision bounds, shape-sphere minima and the explicit test path.
//!
//! `cargo run --release --example bounds`

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use supereight::bounds::{all_reports, kepler_min_action, shape_potential_min, test_path};

fn main() -> anyhow::Result<()> {
    for r in all_reports(48)? {
        println!("{:<22} formula {:>16.12}  oracle {:>16.12}", r.name, r.formula_value, r.oracle_value);
    }

    // the Kepler bound scales like alpha^(2/3) T^(1/3)
    for t in [FRAC_PI_4, 2.0 * FRAC_PI_4] {
        println!("kepler_min_action(4+sqrt2, {t:.4}) = {:.10}", kepler_min_action(4.0 + SQRT_2, t)?);
    }

    let m = shape_potential_min(32)?;
    println!(
        "shape minimum {:.12} at q1 = ({:.4}, {:.4}), q2 = ({:.4}, {:.4})",
        m.value, m.argmin.q1.x, m.argmin.q1.y, m.argmin.q2.x, m.argmin.q2.y
    );

    for t in [0.0, FRAC_PI_4 / 2.0, FRAC_PI_4] {
        let c = test_path(t)?;
        println!("test path t={t:.4}: q1 = ({:.4}, {:.4}), q2 = ({:.4}, {:.4})", c.q1.x, c.q1.y, c.q2.x, c.q2.y);
    }
    Ok(())
}
