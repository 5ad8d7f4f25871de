//! Independent checks of a loop against the Newton flow it should follow.

use std::f64::consts::{FRAC_PI_2, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    acceleration, angular_momentum, energy, newton_rhs, Configuration, PhasePoint,
};
use crate::error::{Error, Result};
use crate::minimizer::{OrbitResult, SEPARATION_GRID};
use crate::ode::{integrate, OdeOptions};
use crate::pathspace::{basis_norm, FourierLoop};
use crate::symmetry::{act_on_loop, g1, g2, g3};

/// Integration aborts when a reduced distance drops below this.
pub const CLOSE_APPROACH: f64 = 1e-6;

/// Number of uniform comparison times in `(0, 2pi]`.
pub const NEWTON_GRID: usize = 256;

/// Integrates the reduced Newton equations and returns the phase points at
/// `times` (monotone, on one side of `t0`).
pub fn integrate_newton(
    initial: &PhasePoint,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<PhasePoint>> {
    initial.config.check_collision_free()?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let guard = |t: f64, y: &[f64; 8]| {
        let d = PhasePoint::from_array(y).config.min_distance();
        if d < CLOSE_APPROACH {
            Err(Error::CloseApproach { time: t, distance: d })
        } else {
            Ok(())
        }
    };
    let ys = integrate(
        |_, y| newton_rhs(y),
        t0,
        initial.to_array(),
        times,
        &OdeOptions::with_tol(tol),
        guard,
    )?;
    Ok(ys.iter().map(PhasePoint::from_array).collect())
}

/// Phase point of a loop at time `t`.
pub fn loop_state(x: &FourierLoop, t: f64) -> PhasePoint {
    let (p1, p2) = x.evaluate_velocity(t);
    PhasePoint::new(x.evaluate(t), p1, p2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `sup |q_flow(t) - q_loop(t)|` over [`NEWTON_GRID`] times; infinite when
    /// the integration aborted.
    pub newton_sup: f64,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    /// `|state(2pi) - state(0)|` of the integrated flow.
    pub periodicity: f64,
    /// `sup_t |q2(t) - q1(t + pi/2)|` of the loop.
    pub choreography: f64,
    /// Largest coefficient change under the three generators.
    pub symmetry: f64,
    pub min_separation: f64,
    /// `sup |q'' - grad U(q)|` of the truncated series itself; dominated by
    /// the highest modes, reported but not used for acceptance.
    pub ode_residual: f64,
}

/// `sup_t |q2(t) - q1(t + pi/2)|` on `n` uniform times.
pub fn choreography_residual(x: &FourierLoop, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            (x.evaluate(t).q2 - x.evaluate(t + FRAC_PI_2).q1).norm()
        })
        .fold(0.0, f64::max)
}

pub fn symmetry_residual(x: &FourierLoop) -> f64 {
    [g1(), g2(), g3()]
        .iter()
        .map(|g| act_on_loop(g, x).coeff_sup_diff(x))
        .fold(0.0, f64::max)
}

pub fn ode_residual(x: &FourierLoop, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let t = TAU * i as f64 / n as f64;
        let (a1, a2) = x.evaluate_acceleration(t);
        let (f1, f2) = acceleration(&x.evaluate(t))?;
        worst = worst.max((a1 - f1).norm().max((a2 - f2).norm()));
    }
    Ok(worst)
}

fn config_distance(a: &Configuration, b: &Configuration) -> f64 {
    ((a.q1 - b.q1).norm_squared() + (a.q2 - b.q2).norm_squared()).sqrt()
}

/// Compares a loop with the Newton flow started from its `t = 0` state.
pub fn loop_residuals(x: &FourierLoop, tol: f64) -> Result<ResidualReport> {
    let start = loop_state(x, 0.0);
    let e0 = energy(&start)?;
    let m0 = angular_momentum(&start);
    let times: Vec<f64> = (1..=NEWTON_GRID)
        .map(|i| TAU * i as f64 / NEWTON_GRID as f64)
        .collect();
    let (newton_sup, energy_drift, momentum_drift, periodicity) =
        match integrate_newton(&start, 0.0, &times, tol) {
            Ok(flow) => {
                let mut sup: f64 = 0.0;
                let mut ed: f64 = 0.0;
                let mut md: f64 = 0.0;
                for (t, p) in times.iter().zip(&flow) {
                    sup = sup.max(config_distance(&p.config, &x.evaluate(*t)));
                    ed = ed.max((energy(p)? - e0).abs());
                    md = md.max((angular_momentum(p) - m0).abs());
                }
                let last = flow.last().expect("grid is non-empty").to_array();
                let per = last
                    .iter()
                    .zip(start.to_array())
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (sup, ed, md, per)
            }
            Err(Error::CloseApproach { .. } | Error::Collision { .. } | Error::Integration { .. }) => {
                (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY)
            }
            Err(e) => return Err(e),
        };
    Ok(ResidualReport {
        newton_sup,
        energy_drift,
        momentum_drift,
        periodicity,
        choreography: choreography_residual(x, 1024),
        symmetry: symmetry_residual(x),
        min_separation: x.min_separation(SEPARATION_GRID),
        ode_residual: ode_residual(x, 1024)?,
    })
}

/// [`loop_residuals`] for a minimizer result; the orbit must be converged.
pub fn residual_report(orbit: &OrbitResult, tol: f64) -> Result<ResidualReport> {
    if !orbit.converged {
        return Err(Error::invalid("residual report needs a converged orbit"));
    }
    loop_residuals(&orbit.path, tol)
}

/// Radius of the rotating square with angular speed 1:
/// `R^3 = 1/2 + 1/sqrt2`.
pub fn rotating_square_radius() -> f64 {
    (0.5 + 1.0 / SQRT_2).cbrt()
}

/// The rotating-square relative equilibrium as a loop of truncation `k`:
/// `q1(t) = R (sin t, cos t)`, `q2(t) = q1(t + pi/2) = R (cos t, -sin t)`.
pub fn rotating_square(k: usize) -> Result<FourierLoop> {
    if k == 0 {
        return Err(Error::invalid("rotating square needs k >= 1"));
    }
    let mut x = FourierLoop::zeros(k);
    let a = rotating_square_radius() * basis_norm(1);
    x.set_xi(1, 0, a);
    x.set_eta(1, 1, a);
    x.set_eta(1, 2, a);
    x.set_xi(1, 3, -a);
    Ok(x)
}
