//! Reduced mechanics of the parallelogram four-body problem.
//!
//! Only `(q1, q2)` are stored; the other two bodies sit at `q3 = -q1` and
//! `q4 = -q2`. The force function is
//!
//! ```text
//! U(q1, q2) = 1/|q1 - q2| + 1/|q1 + q2| + 1/(2|q1|) + 1/(2|q2|)
//! ```
//!
//! and the reduced Lagrangian is `L = (|q1'|^2 + |q2'|^2)/2 + U`, so the
//! equations of motion read `q'' = grad U`. `U` is the *negative* of the
//! potential energy, which is why [`energy`] subtracts it.

use nalgebra::Vector2;

use crate::error::{CollisionPair, Error, Result};

pub type Vec2 = Vector2<f64>;

/// Denominators below this are reported as collisions instead of overflowing.
pub const COLLISION_THRESHOLD: f64 = 1e-12;

/// Reduced configuration `(q1, q2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration {
    pub q1: Vec2,
    pub q2: Vec2,
}

/// Configuration plus momenta (unit masses, so momenta are velocities).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub config: Configuration,
    pub p1: Vec2,
    pub p2: Vec2,
}

impl Configuration {
    pub fn new(q1: Vec2, q2: Vec2) -> Self {
        Self { q1, q2 }
    }

    pub fn from_components(c: [f64; 4]) -> Self {
        Self::new(Vec2::new(c[0], c[1]), Vec2::new(c[2], c[3]))
    }

    pub fn components(&self) -> [f64; 4] {
        [self.q1.x, self.q1.y, self.q2.x, self.q2.y]
    }

    /// The four reduced distances `|q1|, |q2|, |q1 - q2|, |q1 + q2|`.
    pub fn distances(&self) -> [f64; 4] {
        [
            self.q1.norm(),
            self.q2.norm(),
            (self.q1 - self.q2).norm(),
            (self.q1 + self.q2).norm(),
        ]
    }

    pub fn min_distance(&self) -> f64 {
        self.distances().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Errors with the first vanishing denominator, if any.
    pub fn check_collision_free(&self) -> Result<()> {
        const PAIRS: [CollisionPair; 4] = [
            CollisionPair::Q1Origin,
            CollisionPair::Q2Origin,
            CollisionPair::Q1EqQ2,
            CollisionPair::Q1EqNegQ2,
        ];
        for (d, pair) in self.distances().into_iter().zip(PAIRS) {
            // NaN must not slip through as "far away"
            if !(d >= COLLISION_THRESHOLD) {
                return Err(Error::Collision { pair, time: None });
            }
        }
        Ok(())
    }

    pub fn is_collision_free(&self) -> bool {
        self.check_collision_free().is_ok()
    }

    /// All four bodies, `[q1, q2, -q1, -q2]`.
    pub fn lift(&self) -> [Vec2; 4] {
        [self.q1, self.q2, -self.q1, -self.q2]
    }
}

impl PhasePoint {
    pub fn new(config: Configuration, p1: Vec2, p2: Vec2) -> Self {
        Self { config, p1, p2 }
    }

    pub fn to_array(&self) -> [f64; 8] {
        let c = &self.config;
        [
            c.q1.x, c.q1.y, c.q2.x, c.q2.y, self.p1.x, self.p1.y, self.p2.x, self.p2.y,
        ]
    }

    pub fn from_array(y: &[f64; 8]) -> Self {
        Self::new(
            Configuration::new(Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3])),
            Vec2::new(y[4], y[5]),
            Vec2::new(y[6], y[7]),
        )
    }

    pub fn kinetic(&self) -> f64 {
        0.5 * (self.p1.norm_squared() + self.p2.norm_squared())
    }
}

/// Newtonian force function and the strong-force term, evaluated together.
///
/// Returns `(U, W)` with `W = 1/|q1-q2|^2 + 1/|q1+q2|^2 + 1/(2|q1|^2) + 1/(2|q2|^2)`,
/// so that the regularized force function is `U + eps * W`.
pub fn force_functions(c: &Configuration) -> Result<(f64, f64)> {
    c.check_collision_free()?;
    let [r1, r2, r12, s12] = c.distances();
    let u = 1.0 / r12 + 1.0 / s12 + 0.5 / r1 + 0.5 / r2;
    let w = 1.0 / (r12 * r12) + 1.0 / (s12 * s12) + 0.5 / (r1 * r1) + 0.5 / (r2 * r2);
    Ok((u, w))
}

/// `U(q1, q2)`; strictly positive on collision-free configurations.
pub fn potential_u(c: &Configuration) -> Result<f64> {
    force_functions(c).map(|(u, _)| u)
}

/// Gradient of `U + eps * W` with respect to `(q1, q2)`.
pub fn force_gradient(c: &Configuration, eps: f64) -> Result<[Vec2; 2]> {
    c.check_collision_free()?;
    let q1 = c.q1;
    let q2 = c.q2;
    let d = q1 - q2;
    let s = q1 + q2;
    let (r1, r2, rd, rs) = (q1.norm(), q2.norm(), d.norm(), s.norm());
    // d/dq |q|^-1 = -q/|q|^3, d/dq |q|^-2 = -2q/|q|^4
    let kd = 1.0 / rd.powi(3) + 2.0 * eps / rd.powi(4);
    let ks = 1.0 / rs.powi(3) + 2.0 * eps / rs.powi(4);
    let k1 = 0.5 / r1.powi(3) + eps / r1.powi(4);
    let k2 = 0.5 / r2.powi(3) + eps / r2.powi(4);
    let g1 = -k1 * q1 - kd * d - ks * s;
    let g2 = -k2 * q2 + kd * d - ks * s;
    Ok([g1, g2])
}

/// Accelerations `(q1'', q2'')` of the reduced Newton equations.
pub fn acceleration(c: &Configuration) -> Result<(Vec2, Vec2)> {
    force_gradient(c, 0.0).map(|[a1, a2]| (a1, a2))
}

/// Total energy `(|p1|^2 + |p2|^2)/2 - U`.
pub fn energy(p: &PhasePoint) -> Result<f64> {
    Ok(p.kinetic() - potential_u(&p.config)?)
}

/// `q1 x p1 + q2 x p2` for the reduced pair; the four-body total is twice this.
pub fn angular_momentum(p: &PhasePoint) -> f64 {
    let c = &p.config;
    cross(c.q1, p.p1) + cross(c.q2, p.p2)
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Right-hand side of the first-order reduced system on `[q1, q2, p1, p2]`.
pub(crate) fn newton_rhs(y: &[f64; 8]) -> Result<[f64; 8]> {
    let c = Configuration::new(Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3]));
    let (a1, a2) = acceleration(&c)?;
    Ok([y[4], y[5], y[6], y[7], a1.x, a1.y, a2.x, a2.y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn cfg(a: [f64; 4]) -> Configuration {
        Configuration::from_components(a)
    }

    #[test]
    fn potential_square_and_rhombus() {
        let u = potential_u(&cfg([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((u - (SQRT_2 + 1.0)).abs() < 1e-14);
        let u = potential_u(&cfg([0.0, 1.0, 2.0, 0.0])).unwrap();
        assert!((u - (2.0 / 5f64.sqrt() + 0.75)).abs() < 1e-14);
        assert!((u - 1.644427).abs() < 1e-6);
    }

    #[test]
    fn collision_names_the_denominator() {
        let err = potential_u(&cfg([0.0, 0.0, 1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::Collision { pair: CollisionPair::Q1Origin, .. }));
        let err = potential_u(&cfg([1.0, 2.0, 1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::Collision { pair: CollisionPair::Q1EqQ2, .. }));
        let err = potential_u(&cfg([1.0, 2.0, -1.0, -2.0])).unwrap_err();
        assert!(matches!(err, Error::Collision { pair: CollisionPair::Q1EqNegQ2, .. }));
        let err = acceleration(&cfg([1.0, 2.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::Collision { pair: CollisionPair::Q2Origin, .. }));
    }

    #[test]
    fn acceleration_on_the_axes() {
        let (a1, _) = acceleration(&cfg([0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(a1.x.abs() < 1e-15);
        assert!((a1.y - (-0.5 - 1.0 / SQRT_2)).abs() < 1e-14);
        assert!((a1.y + 1.207107).abs() < 1e-6);
    }

    #[test]
    fn square_accelerations_have_equal_magnitude() {
        let (a1, a2) = acceleration(&cfg([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((a1.norm() - a2.norm()).abs() < 1e-14);
    }

    #[test]
    fn energy_and_momentum_basics() {
        let c = cfg([1.0, 0.0, 0.0, 1.0]);
        let p = PhasePoint::new(c, Vec2::zeros(), Vec2::zeros());
        assert!((energy(&p).unwrap() + SQRT_2 + 1.0).abs() < 1e-14);
        assert_eq!(angular_momentum(&p), 0.0);

        let p = PhasePoint::new(
            cfg([1.0, 0.0, 0.0, 3.0]),
            Vec2::new(0.0, 1.0),
            Vec2::zeros(),
        );
        assert!((angular_momentum(&p) - 1.0).abs() < 1e-15);

        let p = PhasePoint::new(c, Vec2::new(0.3, -0.2), Vec2::new(0.1, 0.7));
        let scaled = PhasePoint::new(c, p.p1 * SQRT_2, p.p2 * SQRT_2);
        let diff = energy(&scaled).unwrap() - energy(&p).unwrap();
        assert!((diff - p.kinetic()).abs() < 1e-14);
    }
}
