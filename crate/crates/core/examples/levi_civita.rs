//! Integration straight through the q1 = 0 binary collision in regularized
//! coordinates, with the cubic time law and the exit-side diagnostic.
//!
//! `cargo run --release --example levi_civita`

use num_complex::Complex64;
use supereight::collision::{integrate_through_collision, quadrant_diagnostic};

fn main() -> anyhow::Result<()> {
    let q2 = Complex64::new(1.0, 0.0);
    for p2 in [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.3)] {
        let path = integrate_through_collision(q2, p2, 0.5, 1e-12)?;
        println!(
            "p2 = {p2}: t/tau^3 = {:.8}, max|Im z| = {:.2e}, energy drift {:.1e}",
            path.cubic_coefficient(0.05),
            path.max_abs_im_z(),
            path.energy_drift()
        );
        if p2.im != 0.0 {
            let q = quadrant_diagnostic(q2, p2, 0.4)?;
            println!("    Im b3 = {:+.4}, transverse q1 = {:+.3e} -> {:?}", q.im_b3, q.transverse, q.sign);
        }
    }

    // physical samples on both sides of the collision
    let path = integrate_through_collision(q2, Complex64::new(0.0, 1.0), 0.3, 1e-12)?;
    for (t, c) in path.physical().iter().step_by(100) {
        println!("t = {t:+.6}  q1 = ({:+.3e}, {:+.3e})  q2 = ({:+.6}, {:+.6})", c.q1.x, c.q1.y, c.q2.x, c.q2.y);
    }
    Ok(())
}
