//! Closed-form action bounds and the explicit comparison path, each paired
//! with an independently computed value.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::action::{path_action, ActionValue};
use crate::dynamics::{potential_u, Configuration, Vec2};
use crate::error::{Error, Result};
use crate::pathspace::composite_simpson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub formula_value: f64,
    pub oracle_value: f64,
    pub discrepancy: f64,
}

impl BoundReport {
    pub fn new(name: &str, formula_value: f64, oracle_value: f64) -> Self {
        Self {
            name: name.to_string(),
            formula_value,
            oracle_value,
            discrepancy: (formula_value - oracle_value).abs(),
        }
    }
}

/// Minimal action `(3/2) pi^(2/3) alpha^(2/3) T0^(1/3)` of a Kepler-type
/// path with force function `alpha/r` that starts in collision and has
/// duration `T0`.
pub fn kepler_min_action(alpha: f64, t0: f64) -> Result<f64> {
    if !(alpha > 0.0 && t0 > 0.0) || !alpha.is_finite() || !t0.is_finite() {
        return Err(Error::invalid("kepler_min_action needs alpha > 0 and T0 > 0"));
    }
    Ok(1.5 * PI.powf(2.0 / 3.0) * alpha.powf(2.0 / 3.0) * t0.cbrt())
}

/// Action of the radial collision-to-rest Kepler arc of duration `T0`,
/// integrated numerically in the eccentric anomaly.
///
/// `r = a (1 - cos E)`, `t = s (E - sin E)`, `s = sqrt(a^3/alpha)`,
/// `E in [0, pi]`.
pub fn kepler_arc_action(alpha: f64, t0: f64, intervals: usize) -> Result<f64> {
    if !(alpha > 0.0 && t0 > 0.0) {
        return Err(Error::invalid("kepler_arc_action needs alpha > 0 and T0 > 0"));
    }
    let a = (alpha * t0 * t0 / (PI * PI)).cbrt();
    let s = (a.powi(3) / alpha).sqrt();
    let n = intervals.max(2);
    let vals: Vec<f64> = (0..=n)
        .map(|i| {
            let e = PI * i as f64 / n as f64;
            let one_minus = 1.0 - e.cos();
            let dt = s * one_minus;
            if one_minus == 0.0 {
                // limit of the integrand at the collision
                return 0.5 * a * a * 2.0 / s + alpha * s / a;
            }
            let rdot = a * e.sin() / dt;
            (0.5 * rdot * rdot + alpha / (a * one_minus)) * dt
        })
        .collect();
    composite_simpson(&vals, 0.0, PI)
}

/// `3 2^(-4/3) (1 + 2 sqrt 2)^(2/3) pi`.
pub fn total_collision_lower_bound() -> f64 {
    3.0 * 2f64.powf(-4.0 / 3.0) * (1.0 + 2.0 * SQRT_2).powf(2.0 / 3.0) * PI
}

/// Four-body force function of the configuration `(q1, q2, -q1, -q2)`.
pub fn four_body_potential(c: &Configuration) -> Result<f64> {
    c.check_collision_free()?;
    let [r1, r2, rd, rs] = c.distances();
    Ok(2.0 / rd + 2.0 / rs + 0.5 / r1 + 0.5 / r2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeMinimum {
    pub value: f64,
    pub argmin: Configuration,
}

/// Point of the unit sphere `|q1|^2 + |q2|^2 = 1` from angles.
pub fn sphere_point(chi: f64, a: f64, b: f64) -> Configuration {
    Configuration::new(
        chi.cos() * Vec2::new(a.cos(), a.sin()),
        chi.sin() * Vec2::new(b.cos(), b.sin()),
    )
}

fn eval_or_inf(f: &dyn Fn(&Configuration) -> Result<f64>, c: &Configuration) -> f64 {
    f(c).unwrap_or(f64::INFINITY)
}

/// Minimizes `f` over the unit sphere: brute-force grid of `resolution`
/// points per angle followed by compass search from the best grid point.
pub fn sphere_minimum(
    f: &dyn Fn(&Configuration) -> Result<f64>,
    resolution: usize,
) -> Result<ShapeMinimum> {
    if resolution < 16 {
        return Err(Error::invalid("resolution must be >= 16"));
    }
    let n = resolution;
    let mut best = (f64::INFINITY, [0.0; 3]);
    for i in 0..n {
        // open grid in chi avoids the degenerate poles
        let chi = FRAC_PI_2 * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let a = TAU * j as f64 / n as f64;
            for k in 0..n {
                let b = TAU * k as f64 / n as f64;
                let v = eval_or_inf(f, &sphere_point(chi, a, b));
                if v < best.0 {
                    best = (v, [chi, a, b]);
                }
            }
        }
    }
    let (mut val, mut p) = best;
    let mut h = TAU / n as f64;
    while h > 1e-13 {
        let mut improved = false;
        for d in 0..3 {
            for sgn in [1.0, -1.0] {
                let mut q = p;
                q[d] += sgn * h;
                let v = eval_or_inf(f, &sphere_point(q[0], q[1], q[2]));
                if v < val {
                    val = v;
                    p = q;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(ShapeMinimum {
        value: val,
        argmin: sphere_point(p[0], p[1], p[2]),
    })
}

/// Minimum of the reduced force function `U` on the unit sphere; the exact
/// value is `2 + sqrt 2` at the square.
pub fn shape_potential_min(resolution: usize) -> Result<ShapeMinimum> {
    sphere_minimum(&potential_u, resolution)
}

/// Same for the four-body force function; the exact value is `4 + sqrt 2`.
pub fn shape_four_body_min(resolution: usize) -> Result<ShapeMinimum> {
    sphere_minimum(&four_body_potential, resolution)
}

/// `q1 = (t, pi/4 - 2t)`, `q2 = (pi/2 - t, t)` on `[0, pi/4]`.
pub fn test_path(t: f64) -> Result<Configuration> {
    if !(0.0..=FRAC_PI_4).contains(&t) {
        return Err(Error::invalid(format!("test path time {t} outside [0, pi/4]")));
    }
    Ok(Configuration::new(
        Vec2::new(t, FRAC_PI_4 - 2.0 * t),
        Vec2::new(FRAC_PI_2 - t, t),
    ))
}

/// Constant velocities of [`test_path`].
pub fn test_path_velocity() -> [Vec2; 2] {
    [Vec2::new(1.0, -2.0), Vec2::new(-1.0, 1.0)]
}

/// Quoted upper estimate `7pi/8 + sqrt5/4 + sqrt2/8 + sqrt13/4 + 1/2`.
pub fn test_path_bound_constant() -> f64 {
    7.0 * PI / 8.0 + 5f64.sqrt() / 4.0 + SQRT_2 / 8.0 + 13f64.sqrt() / 4.0 + 0.5
}

/// Action of the test path by Simpson's rule on `intervals` intervals.
pub fn test_path_action_value(intervals: usize) -> Result<ActionValue> {
    path_action(
        |t| (test_path(t.clamp(0.0, FRAC_PI_4)).unwrap(), test_path_velocity()),
        0.0,
        intervals,
    )
}

/// Compares the quoted constant with the quadrature value.
pub fn test_path_action() -> Result<BoundReport> {
    let v = test_path_action_value(4096)?;
    Ok(BoundReport::new("test_path_action", test_path_bound_constant(), v.total))
}

/// Every report printed by the `bounds` command.
pub fn all_reports(resolution: usize) -> Result<Vec<BoundReport>> {
    let alpha = 4.0 + SQRT_2;
    let kep = kepler_min_action(alpha, FRAC_PI_4)?;
    let tp = test_path_action_value(4096)?;
    Ok(vec![
        BoundReport::new(
            "kepler_min_action",
            kep,
            kepler_arc_action(alpha, FRAC_PI_4, 4096)?,
        ),
        BoundReport::new("total_collision", total_collision_lower_bound(), kep),
        BoundReport::new(
            "shape_min_reduced",
            2.0 + SQRT_2,
            shape_potential_min(resolution)?.value,
        ),
        BoundReport::new(
            "shape_min_four_body",
            4.0 + SQRT_2,
            shape_four_body_min(resolution)?.value,
        ),
        BoundReport::new("test_path_kinetic", 7.0 * PI / 8.0, tp.kinetic),
        BoundReport::new("test_path_action", test_path_bound_constant(), tp.total),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    // scipy.integrate.quad of the test-path Lagrangian over [0, pi/4]
    const TEST_PATH_ORACLE: f64 = 4.97024728364571;

    #[test]
    fn kepler_values() {
        assert!((kepler_min_action(1.0, PI).unwrap() - 1.5 * PI).abs() < 1e-13);
        let a = kepler_min_action(1.3, 0.7).unwrap();
        let b = kepler_min_action(8.0 * 1.3, 0.7).unwrap();
        assert!((b - 4.0 * a).abs() < 1e-12);
        assert!(kepler_min_action(0.0, 1.0).is_err());
        assert!(kepler_min_action(1.0, -1.0).is_err());
        let arc = kepler_arc_action(2.0, 1.5, 2048).unwrap();
        assert!((arc - kepler_min_action(2.0, 1.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn total_collision_identity() {
        let v = total_collision_lower_bound();
        assert!(v > 9.0 && (9.15..=9.16).contains(&v));
        let k = kepler_min_action(4.0 + SQRT_2, FRAC_PI_4).unwrap();
        assert!((v - k).abs() < 1e-10);
        assert!((v - 9.1533075795651).abs() < 1e-12);
    }

    #[test]
    fn test_path_facts() {
        let c = test_path(0.0).unwrap();
        assert_eq!(c.q1, Vec2::new(0.0, FRAC_PI_4));
        assert_eq!(c.q2, Vec2::new(FRAC_PI_2, 0.0));
        let [v1, v2] = test_path_velocity();
        assert_eq!(0.5 * (v1.norm_squared() + v2.norm_squared()), 3.5);
        assert!(test_path(1.0).is_err());
        let a = test_path_action_value(4096).unwrap();
        assert!((a.kinetic - 7.0 * PI / 8.0).abs() < 1e-10);
        assert!((a.total - TEST_PATH_ORACLE).abs() < 1e-9);
        assert!(a.total < 5.0);
        assert!((test_path_bound_constant() - 4.88607508042865).abs() < 1e-12);
    }

    #[test]
    fn shape_minimum_is_the_square() {
        let m = shape_potential_min(24).unwrap();
        assert!((m.value - (2.0 + SQRT_2)).abs() < 1e-10);
        let (q1, q2) = (m.argmin.q1, m.argmin.q2);
        assert!((q1.norm() - q2.norm()).abs() < 1e-6);
        assert!(q1.dot(&q2).abs() < 1e-6);
        let m4 = shape_four_body_min(24).unwrap();
        assert!((m4.value - (4.0 + SQRT_2)).abs() < 1e-10);
        let fine = shape_potential_min(48).unwrap();
        assert!((fine.value - m.value).abs() < 1e-6);
    }
}
