//! The 16-element symmetry group: generators, time maps, and the projection
//! of an arbitrary loop onto the fixed subspace.
//!
//! `cargo run --release --example symmetry_group`

use supereight::pathspace::FourierLoop;
use supereight::symmetry::{act_on_loop, boundary_residual, g1, g2, g3, group, loop_to_segment, segment_to_loop};

fn main() -> anyhow::Result<()> {
    let h = group();
    println!("|H| = {}", h.len());
    for (i, g) in h.elements().iter().enumerate() {
        let tm = g.time_map();
        println!(
            "{i:>2}: sigma {:?}  reversed {}  quarter turns {}  det rho {:+.0}",
            g.sigma,
            tm.reversed,
            tm.quarter_turns,
            g.rho.determinant()
        );
    }

    // a loop with every coefficient set, then projected
    let k = 6;
    let mut x = FourierLoop::zeros(k);
    for l in 0..=k {
        for j in 0..4 {
            let v = 1.0 / (1.0 + (l + j) as f64);
            x.set_xi(l, j, v);
            x.set_eta(l, j, -v);
        }
    }
    let p = h.project(&x);
    println!("|x|_H1 = {:.6}, |Px|_H1 = {:.6}", x.h1_norm(), p.h1_norm());
    for (name, g) in [("g1", g1()), ("g2", g2()), ("g3", g3())] {
        println!("{name}: |g x - x| = {:.3e}, |g Px - Px| = {:.3e}",
            act_on_loop(&g, &x).coeff_sup_diff(&x),
            act_on_loop(&g, &p).coeff_sup_diff(&p));
    }
    println!("boundary residual of Px: {:?}", boundary_residual(&p));

    // the fundamental segment determines the loop
    let seg = loop_to_segment(&p, 8);
    let back = segment_to_loop(&seg, 32, 1e-10)?;
    println!("segment round trip sup error {:.3e}", loop_to_segment(&back, 8).sup_distance(&seg));
    Ok(())
}
