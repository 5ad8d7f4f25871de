//! Collision diagnostics: the blow-up scaling ODE and Levi-Civita
//! regularization of the `q1 = 0` binary collision.
//!
//! # Scaling limit
//!
//! Blowing up a minimizing sequence at a near collision with strong-force
//! ratio `d = lim eps_n / delta_n` gives the planar ODE
//!
//! ```text
//! y'' + y / (2|y|^3) + d y / |y|^4 = 0,   y(0) = (0, 1),   y'(0) = ±sqrt(1 + d) (1, 0)
//! ```
//!
//! on the zero-energy level `|y'|^2/2 - 1/(2|y|) - d/(2|y|^2) = 0`. The polar
//! angle starts at `pi/2` and converges to `pi/2 ∓ pi sqrt(1 + d)`.
//!
//! # Levi-Civita coordinates
//!
//! With `R^2 = C`, `q1 = -(i/2) z^2`, `p1 = -i w / conj(z)` and
//! `dt = |z|^2 dtau`. Since `q2 ∓ q1 = ±(i/2)(z^2 ∓ 2i q2)` every mutual
//! distance involving `q1` is `|z^2 ∓ 2i q2| / 2`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{energy, newton_rhs, Configuration, PhasePoint, Vec2, COLLISION_THRESHOLD};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};

/// Ejection branch: `+` moves toward positive `x` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            _ => Err(Error::invalid(format!("branch must be + or -, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub s: f64,
    pub y: [f64; 2],
    pub r: f64,
    /// Unwrapped polar angle.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTrajectory {
    pub d: f64,
    pub branch: Branch,
    pub samples: Vec<ScalingSample>,
    /// Largest `|energy|` seen on the samples; the exact value is zero.
    pub energy_drift: f64,
}

impl ScalingTrajectory {
    /// Limit angle extrapolated from the tail of the trajectory.
    ///
    /// On the zero-energy level `theta(r) = theta_inf + c1 x + c2 x^2 + ...`
    /// with `x = r^(-1/2)`, so a low-degree polynomial in `x` fitted to the
    /// last samples is evaluated at `x = 0`.
    pub fn extrapolated_theta(&self) -> Result<f64> {
        let n = self.samples.len();
        if n < 16 {
            return Err(Error::invalid("too few samples for extrapolation"));
        }
        let tail = &self.samples[n / 2..];
        let xs: Vec<f64> = tail.iter().map(|p| p.r.powf(-0.5)).collect();
        let ys: Vec<f64> = tail.iter().map(|p| p.theta).collect();
        let coef = polyfit(&xs, &ys, 4)?;
        Ok(coef[0])
    }

    pub fn final_theta(&self) -> f64 {
        self.samples.last().map(|p| p.theta).unwrap_or(FRAC_PI_2)
    }
}

/// `|y'|^2/2 - 1/(2|y|) - d/(2|y|^2)`.
pub fn scaling_energy(d: f64, y: [f64; 4]) -> f64 {
    let r2 = y[0] * y[0] + y[1] * y[1];
    let r = r2.sqrt();
    0.5 * (y[2] * y[2] + y[3] * y[3]) - 0.5 / r - 0.5 * d / r2
}

fn scaling_rhs(d: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
    let r2 = y[0] * y[0] + y[1] * y[1];
    let r = r2.sqrt();
    if !(r > COLLISION_THRESHOLD) {
        return Err(Error::Integration {
            time: f64::NAN,
            reason: "scaling trajectory reached the origin".into(),
        });
    }
    let k = 0.5 / (r2 * r) + d / (r2 * r2);
    Ok([y[2], y[3], -k * y[0], -k * y[1]])
}

/// Integrates the scaling ODE on `[0, s_max]` with relative tolerance `tol`.
/// Samples are geometric in `s` so that the tail is resolved for
/// [`ScalingTrajectory::extrapolated_theta`].
pub fn integrate_scaling(d: f64, branch: Branch, s_max: f64, tol: f64) -> Result<ScalingTrajectory> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("d must be finite and >= 0, got {d}")));
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::invalid("s_max must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    const N: usize = 2000;
    let s0 = (s_max * 1e-4).min(1e-2);
    let mut times = vec![0.0];
    times.extend((0..N).map(|i| s0 * (s_max / s0).powf(i as f64 / (N - 1) as f64)));
    *times.last_mut().expect("non-empty") = s_max;

    let y0 = [0.0, 1.0, branch.sign() * (1.0 + d).sqrt(), 0.0];
    let opts = OdeOptions::with_tol(tol);
    let states = integrate(|_, y| scaling_rhs(d, y), 0.0, y0, &times, &opts, |_, _| Ok(()))?;

    let mut samples = Vec::with_capacity(states.len());
    let mut theta = FRAC_PI_2;
    let mut prev = FRAC_PI_2;
    let mut drift: f64 = 0.0;
    for (&s, y) in times.iter().zip(&states) {
        let raw = y[1].atan2(y[0]);
        let mut step = raw - prev;
        step -= (step / (2.0 * PI)).round() * 2.0 * PI;
        theta += step;
        prev = raw;
        drift = drift.max(scaling_energy(d, *y).abs());
        samples.push(ScalingSample {
            s,
            y: [y[0], y[1]],
            r: y[0].hypot(y[1]),
            theta,
        });
    }
    Ok(ScalingTrajectory {
        d,
        branch,
        samples,
        energy_drift: drift,
    })
}

/// `pi/2 ∓ pi sqrt(1 + d)`.
pub fn theta_asymptote(d: f64, branch: Branch) -> f64 {
    FRAC_PI_2 - branch.sign() * PI * (1.0 + d).sqrt()
}

/// `(cos sqrt2 s, ± sin sqrt2 s)`: the `d -> inf` limit, a unit circle
/// solving `y'' + 2 y / |y|^4 = 0`. It starts on the x-axis, a quarter turn
/// ahead of the finite-`d` initial point `(0, 1)`.
pub fn y_infinity(s: f64, branch: Branch) -> [f64; 2] {
    let a = SQRT_2 * s;
    [a.cos(), branch.sign() * a.sin()]
}

/// Least-squares polynomial coefficients, lowest degree first.
fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let cols = degree + 1;
    if x.len() != y.len() || x.len() < cols {
        return Err(Error::invalid("polyfit needs at least degree + 1 points"));
    }
    let a = nalgebra::DMatrix::from_fn(x.len(), cols, |i, j| x[i].powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::invalid(format!("polyfit: {e}")))?;
    Ok(sol.iter().copied().collect())
}

/// Regularized state. `energy` is a parameter of the flow, carried along so
/// the state is self-contained at `z = 0` where it cannot be recomputed.
///
/// `(z, w)` and `(-z, -w)` describe the same physical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCState {
    pub z: Complex64,
    pub w: Complex64,
    pub q2: Complex64,
    pub p2: Complex64,
    pub energy: f64,
}

fn c(v: Vec2) -> Complex64 {
    Complex64::new(v.x, v.y)
}

fn v(z: Complex64) -> Vec2 {
    Vec2::new(z.re, z.im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl LCState {
    /// Energy recomputed from the state; undefined at `z = 0`.
    pub fn energy_relation(&self) -> Result<f64> {
        let z2 = self.z.norm_sqr();
        if z2 == 0.0 {
            return Err(Error::invalid("energy relation is singular at z = 0"));
        }
        let zz = self.z * self.z;
        let dm = (zz - 2.0 * I * self.q2).norm();
        let dp = (zz + 2.0 * I * self.q2).norm();
        Ok((self.w.norm_sqr() - 2.0) / (2.0 * z2) + 0.5 * self.p2.norm_sqr()
            - 2.0 / dm
            - 2.0 / dp
            - 0.5 / self.q2.norm())
    }

    pub fn q1(&self) -> Complex64 {
        -0.5 * I * self.z * self.z
    }

    pub fn negated(&self) -> Self {
        Self {
            z: -self.z,
            w: -self.w,
            ..*self
        }
    }

    fn to_array(self) -> [f64; 8] {
        [
            self.z.re, self.z.im, self.w.re, self.w.im, self.q2.re, self.q2.im, self.p2.re,
            self.p2.im,
        ]
    }

    fn from_array(y: &[f64], energy: f64) -> Self {
        Self {
            z: Complex64::new(y[0], y[1]),
            w: Complex64::new(y[2], y[3]),
            q2: Complex64::new(y[4], y[5]),
            p2: Complex64::new(y[6], y[7]),
            energy,
        }
    }
}

/// Regularizing transform; picks the square root with `Re z >= 0`.
pub fn lc_transform(p: &PhasePoint) -> Result<LCState> {
    let q1 = c(p.config.q1);
    if q1.norm() < COLLISION_THRESHOLD {
        return Err(Error::invalid("lc_transform needs q1 != 0; build the LCState directly"));
    }
    let mut z = (2.0 * I * q1).sqrt();
    if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        z = -z;
    }
    let w = I * z.conj() * c(p.p1);
    Ok(LCState {
        z,
        w,
        q2: c(p.config.q2),
        p2: c(p.p2),
        energy: energy(p)?,
    })
}

/// Back to physical coordinates; both signs of `(z, w)` give the same point.
pub fn lc_inverse(l: &LCState) -> Result<PhasePoint> {
    if l.z.norm() < COLLISION_THRESHOLD {
        return Err(Error::invalid("momentum p1 is undefined at z = 0"));
    }
    let p1 = -I * l.w / l.z.conj();
    Ok(PhasePoint::new(Configuration::new(v(l.q1()), v(l.q2)), v(p1), v(l.p2)))
}

/// `d/dtau` of `(z, w, q2, p2)`.
pub fn lc_rhs(l: &LCState) -> Result<[Complex64; 4]> {
    let (z, w, q2, p2) = (l.z, l.w, l.q2, l.p2);
    let r2 = q2.norm();
    let zz = z * z;
    let am = zz - 2.0 * I * q2;
    let ap = zz + 2.0 * I * q2;
    let (dm, dp) = (am.norm(), ap.norm());
    if r2 < COLLISION_THRESHOLD || dm < COLLISION_THRESHOLD || dp < COLLISION_THRESHOLD {
        return Err(Error::SecondaryCollision { tau: f64::NAN });
    }
    let z2 = z.norm_sqr();
    let dz = w;
    let dq2 = z2 * p2;
    let dw = z * (2.0 * l.energy - p2.norm_sqr() + 4.0 / dm + 4.0 / dp + 1.0 / r2)
        - 4.0 * z2 * z.conj() * (am / dm.powi(3) + ap / dp.powi(3));
    let dp2 = z2 * (-q2 / (2.0 * r2.powi(3)) - 4.0 * I * am / dm.powi(3) + 4.0 * I * ap / dp.powi(3));
    Ok([dz, dw, dq2, dp2])
}

/// One regularized sample: `tau`, physical time and the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCSample {
    pub tau: f64,
    pub t: f64,
    pub state: LCState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionPath {
    /// Sorted by `tau`, covering both sides of the collision at `tau = 0`.
    pub samples: Vec<LCSample>,
}

impl CollisionPath {
    /// `(t, q1, q2)` in physical coordinates.
    pub fn physical(&self) -> Vec<(f64, Configuration)> {
        self.samples
            .iter()
            .map(|s| (s.t, Configuration::new(v(s.state.q1()), v(s.state.q2))))
            .collect()
    }

    /// Least-squares `c` in `t = c tau^3` over samples with `|tau| <= tau_max`.
    pub fn cubic_coefficient(&self, tau_max: f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for s in self.samples.iter().filter(|s| s.tau.abs() <= tau_max) {
            let t3 = s.tau.powi(3);
            num += s.t * t3;
            den += t3 * t3;
        }
        num / den
    }

    pub fn max_abs_im_z(&self) -> f64 {
        self.samples.iter().map(|s| s.state.z.im.abs()).fold(0.0, f64::max)
    }

    /// Largest `|E(state) - E|` over samples away from `z = 0`.
    pub fn energy_drift(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.state.energy_relation().ok().map(|e| (e - s.state.energy).abs()))
            .fold(0.0, f64::max)
    }
}

/// Energy of the collision state `z = 0, w = sqrt2` whose binary part
/// `(|w|^2 - 2) / (2|z|^2)` vanishes in the limit.
pub fn collision_energy(q2: Complex64, p2: Complex64) -> f64 {
    0.5 * p2.norm_sqr() - 2.5 / q2.norm()
}

/// Integrates the regularized flow from the collision `z = 0, w = sqrt2`
/// forward and backward over `|tau| <= tau_span`, together with
/// `dt/dtau = |z|^2`.
pub fn integrate_through_collision(
    q2_0: Complex64,
    p2_0: Complex64,
    tau_span: f64,
    tol: f64,
) -> Result<CollisionPath> {
    if q2_0.norm() < COLLISION_THRESHOLD || !q2_0.is_finite() || !p2_0.is_finite() {
        return Err(Error::invalid("q2_0 must be finite and nonzero"));
    }
    if !(tau_span > 0.0 && tau_span.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tau_span and tol must be positive"));
    }
    let e = collision_energy(q2_0, p2_0);
    let start = LCState {
        z: Complex64::new(0.0, 0.0),
        w: Complex64::new(SQRT_2, 0.0),
        q2: q2_0,
        p2: p2_0,
        energy: e,
    };
    let mut y0 = [0.0; 9];
    y0[..8].copy_from_slice(&start.to_array());
    let rhs = |tau: f64, y: &[f64; 9]| -> Result<[f64; 9]> {
        let l = LCState::from_array(&y[..8], e);
        let d = lc_rhs(&l).map_err(|err| match err {
            Error::SecondaryCollision { .. } => Error::SecondaryCollision { tau },
            other => other,
        })?;
        let mut out = [0.0; 9];
        for (k, dk) in d.iter().enumerate() {
            out[2 * k] = dk.re;
            out[2 * k + 1] = dk.im;
        }
        out[8] = l.z.norm_sqr();
        Ok(out)
    };
    const N: usize = 400;
    let opts = OdeOptions::with_tol(tol);
    let fwd: Vec<f64> = (1..=N).map(|i| tau_span * i as f64 / N as f64).collect();
    let bwd: Vec<f64> = fwd.iter().map(|t| -t).collect();
    let yf = integrate(rhs, 0.0, y0, &fwd, &opts, |_, _| Ok(()))?;
    let yb = integrate(rhs, 0.0, y0, &bwd, &opts, |_, _| Ok(()))?;

    let sample = |tau: f64, y: &[f64; 9]| LCSample {
        tau,
        t: y[8],
        state: LCState::from_array(&y[..8], e),
    };
    let mut samples: Vec<LCSample> = bwd.iter().zip(&yb).rev().map(|(&t, y)| sample(t, y)).collect();
    samples.push(sample(0.0, &y0));
    samples.extend(fwd.iter().zip(&yf).map(|(&t, y)| sample(t, y)));
    Ok(CollisionPath { samples })
}

/// Sign of the transverse displacement of `q1` just after the collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadrantSign {
    Positive,
    Negative,
    /// Below the noise floor of the integration.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantReport {
    /// `Im b3` with `b3 = (2/3) q2'(0)`.
    pub im_b3: f64,
    /// Transverse component of `q1` (off the ejection axis) at the probe.
    pub transverse: f64,
    /// Component of `q1` along the ejection direction `-i`.
    pub along: f64,
    pub t_probe: f64,
    pub sign: QuadrantSign,
}

/// Integrates through the collision and reports on which side of the
/// ejection axis `q1` leaves.
///
/// Along the ejection `q1 ≈ -i t^(2/3)`, and the first non-real Taylor
/// coefficient of `z` pushes it off the imaginary axis, so the measured
/// quantity is `Re q1` at `tau = tau_probe`.
pub fn quadrant_diagnostic(q2_0: Complex64, p2_0: Complex64, tau_probe: f64) -> Result<QuadrantReport> {
    if p2_0.norm() == 0.0 {
        return Err(Error::invalid("quadrant diagnostic needs p2_0 != 0"));
    }
    let path = integrate_through_collision(q2_0, p2_0, tau_probe, 1e-13)?;
    let last = path.samples.last().expect("non-empty");
    let q1 = last.state.q1();
    // roundoff in q1 is at the level of eps |q1|, amplified by the step count
    let floor = 1e-11 * q1.norm();
    let sign = if q1.re.abs() <= floor {
        QuadrantSign::Indeterminate
    } else if q1.re > 0.0 {
        QuadrantSign::Positive
    } else {
        QuadrantSign::Negative
    };
    Ok(QuadrantReport {
        im_b3: (2.0 / 3.0) * p2_0.im,
        transverse: q1.re,
        along: -q1.im,
        t_probe: last.t,
        sign,
    })
}

/// Integrates the unregularized reduced system on `[t0, t1]`, for comparing
/// against the regularized path away from the collision.
pub fn newton_flow(p: &PhasePoint, t0: f64, t1: f64, tol: f64) -> Result<PhasePoint> {
    let y = integrate(
        |_, y| newton_rhs(y),
        t0,
        p.to_array(),
        &[t1],
        &OdeOptions::with_tol(tol),
        |_, _| Ok(()),
    )?;
    Ok(PhasePoint::from_array(&y[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scaling_energy_and_escape() {
        let tr = integrate_scaling(0.0, Branch::Plus, 1e3, 1e-12).unwrap();
        assert!(tr.energy_drift < 1e-10, "drift {}", tr.energy_drift);
        let tail = &tr.samples[tr.samples.len() - 200..];
        assert!(tail.windows(2).all(|w| w[1].r > w[0].r));
        assert_eq!(tr.samples[0].theta, FRAC_PI_2);
    }

    #[test]
    fn scaling_asymptotes() {
        for d in [0.0, 0.5, 1.0, 2.0] {
            let tr = integrate_scaling(d, Branch::Plus, 1e3, 1e-12).unwrap();
            let th = tr.extrapolated_theta().unwrap();
            let exact = theta_asymptote(d, Branch::Plus);
            assert!((th - exact).abs() < 1e-2, "d={d}: {th} vs {exact}");
            assert!(tr.energy_drift < 1e-10);
        }
    }

    #[test]
    fn scaling_branches_mirror() {
        let p = integrate_scaling(0.7, Branch::Plus, 50.0, 1e-12).unwrap();
        let m = integrate_scaling(0.7, Branch::Minus, 50.0, 1e-12).unwrap();
        for (a, b) in p.samples.iter().zip(&m.samples) {
            assert!((a.theta - FRAC_PI_2 + b.theta - FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_forms() {
        assert!((theta_asymptote(0.0, Branch::Plus) + FRAC_PI_2).abs() < 1e-15);
        assert!((theta_asymptote(3.0, Branch::Plus) + 1.5 * PI).abs() < 1e-14);
        assert!((theta_asymptote(0.0, Branch::Minus) - 1.5 * PI).abs() < 1e-14);
        for i in 0..100 {
            let s = 0.05 * i as f64;
            let y = y_infinity(s, Branch::Minus);
            let h = 1e-4;
            let (a, b) = (y_infinity(s - h, Branch::Minus), y_infinity(s + h, Branch::Minus));
            let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-15);
            for k in 0..2 {
                // closed form second derivative is -2 y
                let fd = (a[k] - 2.0 * y[k] + b[k]) / (h * h);
                assert!((fd + 2.0 * y[k] / r.powi(4)).abs() < 1e-6);
            }
        }
        let s = PI / (2.0 * SQRT_2);
        assert!(y_infinity(s, Branch::Plus)[0].abs() < 1e-15);
    }

    #[test]
    fn transform_examples_and_roundtrip() {
        let l = LCState {
            z: Complex64::new(1.0, 0.0),
            w: Complex64::new(SQRT_2, 0.0),
            q2: Complex64::new(2.0, 0.5),
            p2: Complex64::new(0.0, 0.0),
            energy: 0.0,
        };
        let p = lc_inverse(&l).unwrap();
        assert!((p.config.q1 - Vec2::new(0.0, -0.5)).norm() < 1e-15);
        assert!((p.p1 - Vec2::new(0.0, -SQRT_2)).norm() < 1e-15);
        let n = lc_inverse(&l.negated()).unwrap();
        assert!((n.config.q1 - p.config.q1).norm() < 1e-15 && (n.p1 - p.p1).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut a = [0.0; 8];
            a.iter_mut().for_each(|x| *x = rng.random_range(-2.0..2.0));
            let p = PhasePoint::from_array(&a);
            if !p.config.is_collision_free() {
                continue;
            }
            let l = lc_transform(&p).unwrap();
            assert!(l.z.re >= 0.0);
            let back = lc_inverse(&l).unwrap().to_array();
            for (x, y) in back.iter().zip(&a) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!((l.energy_relation().unwrap() - l.energy).abs() < 1e-10);
        }
        let zero = PhasePoint::from_array(&[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(lc_transform(&zero).is_err());
    }

    #[test]
    fn rhs_matches_newton_in_physical_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut a = [0.0; 8];
            a.iter_mut().for_each(|x| *x = rng.random_range(-1.5..1.5));
            let p = PhasePoint::from_array(&a);
            if p.config.min_distance() < 0.1 {
                continue;
            }
            let l = lc_transform(&p).unwrap();
            let [dz, dw, dq2, dp2] = lc_rhs(&l).unwrap();
            let z2 = l.z.norm_sqr();
            let f = newton_rhs(&a).unwrap();
            // dq1/dt = -i z z' / |z|^2
            let dq1 = -I * l.z * dz / z2;
            assert!((dq1 - Complex64::new(f[0], f[1])).norm() < 1e-10);
            assert!((dq2 / z2 - Complex64::new(f[2], f[3])).norm() < 1e-10);
            assert!((dp2 / z2 - Complex64::new(f[6], f[7])).norm() < 1e-9);
            // p1 = -i w / conj(z), so dp1/dtau = -i (w' conj(z) - w conj(w)) / conj(z)^2
            let zc = l.z.conj();
            let dp1 = -I * (dw * zc - l.w * dz.conj()) / (zc * zc);
            assert!((dp1 / z2 - Complex64::new(f[4], f[5])).norm() < 1e-8);
        }
    }

    #[test]
    fn rhs_is_regular_at_the_collision() {
        let l = LCState {
            z: Complex64::new(0.0, 0.0),
            w: Complex64::new(SQRT_2, 0.0),
            q2: Complex64::new(1.0, 0.0),
            p2: Complex64::new(0.0, 1.0),
            energy: collision_energy(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
        };
        let [dz, dw, dq2, dp2] = lc_rhs(&l).unwrap();
        assert_eq!(dz, l.w);
        assert_eq!(dw.norm(), 0.0);
        assert_eq!(dq2.norm(), 0.0);
        assert_eq!(dp2.norm(), 0.0);
        let bad = LCState { q2: Complex64::new(0.0, 0.0), ..l };
        assert!(matches!(lc_rhs(&bad), Err(Error::SecondaryCollision { .. })));
    }

    #[test]
    fn real_case_stays_on_the_axis() {
        let path = integrate_through_collision(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 0.5, 1e-12)
            .unwrap();
        assert!(path.max_abs_im_z() < 1e-10);
        for (_, c) in path.physical() {
            assert!(c.q1.x.abs() < 1e-9);
        }
        assert!(path.energy_drift() < 1e-9, "drift {}", path.energy_drift());
    }

    #[test]
    fn cubic_time_law() {
        for p2 in [Complex64::new(0.0, 0.0), I, -I] {
            let path = integrate_through_collision(Complex64::new(1.0, 0.0), p2, 0.2, 1e-12).unwrap();
            let c3 = path.cubic_coefficient(0.05);
            assert!((c3 / (2.0 / 3.0) - 1.0).abs() < 1e-2, "c3 = {c3}");
            assert!(path.samples.windows(2).all(|w| w[1].t > w[0].t));
        }
    }

    #[test]
    fn regularized_path_matches_newton_away_from_collision() {
        let path = integrate_through_collision(Complex64::new(1.0, 0.2), Complex64::new(0.1, 0.4), 0.6, 1e-13)
            .unwrap();
        let n = path.samples.len();
        let a = &path.samples[n - 150];
        let b = &path.samples[n - 1];
        let pa = lc_inverse(&a.state).unwrap();
        let pb = lc_inverse(&b.state).unwrap();
        let pn = newton_flow(&pa, a.t, b.t, 1e-13).unwrap();
        for (x, y) in pn.to_array().iter().zip(pb.to_array()) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn regularized_path_is_smooth_through_zero() {
        let path = integrate_through_collision(Complex64::new(1.0, 0.0), I, 0.1, 1e-13).unwrap();
        let tau: Vec<f64> = path.samples.iter().map(|s| s.tau).collect();
        for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
            let y: Vec<f64> = path.samples.iter().map(|s| part(s.state.z)).collect();
            let c = polyfit(&tau, &y, 12).unwrap();
            let worst = tau
                .iter()
                .zip(&y)
                .map(|(t, v)| (c.iter().rev().fold(0.0, |acc, a| acc * t + a) - v).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "fit residual {worst}");
        }
    }

    #[test]
    fn quadrant_signs() {
        let q = Complex64::new(1.0, 0.0);
        let up = quadrant_diagnostic(q, I, 0.4).unwrap();
        let down = quadrant_diagnostic(q, -I, 0.4).unwrap();
        assert!(up.im_b3 > 0.0);
        assert_eq!(up.sign, QuadrantSign::Negative, "{up:?}");
        assert_eq!(down.sign, QuadrantSign::Positive, "{down:?}");
        let conj = quadrant_diagnostic(q.conj(), I.conj(), 0.4).unwrap();
        assert_eq!(conj.sign, down.sign);
        assert!(quadrant_diagnostic(q, Complex64::new(0.0, 0.0), 0.4).is_err());
    }
}
