//! Regularized action on segments and full loops, and its H^1 gradient.
//!
//! The Lagrangian is `L_eps = (|q1'|^2 + |q2'|^2)/2 + U + eps W` with `U`, `W`
//! as in [`crate::dynamics::force_functions`]. Over a full period the
//! kinetic part is evaluated exactly from the coefficients; the force terms
//! use the trapezoid rule. Over `[0, pi/4]` everything uses Simpson's rule.

use std::f64::consts::{FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use crate::dynamics::{force_functions, force_gradient, Configuration, Vec2};
use crate::error::{Error, Result};
use crate::pathspace::{composite_simpson, periodic_trapezoid, FourierLoop, SampleGrid};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionValue {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub strong_force: f64,
}

impl ActionValue {
    pub fn new(kinetic: f64, potential: f64, strong_force: f64) -> Self {
        Self {
            total: kinetic + potential + strong_force,
            kinetic,
            potential,
            strong_force,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.kinetic, s * self.potential, s * self.strong_force)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps must be finite and >= 0, got {eps}")))
    }
}

fn at_time(e: Error, t: f64) -> Error {
    match e {
        Error::Collision { pair, .. } => Error::Collision { pair, time: Some(t) },
        other => other,
    }
}

/// Action of an arbitrary path over `[0, pi/4]` by composite Simpson on
/// `intervals + 1` points. `path(t)` returns the configuration and velocities.
pub fn path_action(
    path: impl Fn(f64) -> (Configuration, [Vec2; 2]),
    eps: f64,
    intervals: usize,
) -> Result<ActionValue> {
    check_eps(eps)?;
    let n = intervals.max(2);
    let mut kin = Vec::with_capacity(n + 1);
    let mut pot = Vec::with_capacity(n + 1);
    let mut strong = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = FRAC_PI_4 * i as f64 / n as f64;
        let (c, [v1, v2]) = path(t);
        let (u, w) = force_functions(&c).map_err(|e| at_time(e, t))?;
        kin.push(0.5 * (v1.norm_squared() + v2.norm_squared()));
        pot.push(u);
        strong.push(eps * w);
    }
    Ok(ActionValue::new(
        composite_simpson(&kin, 0.0, FRAC_PI_4)?,
        composite_simpson(&pot, 0.0, FRAC_PI_4)?,
        composite_simpson(&strong, 0.0, FRAC_PI_4)?,
    ))
}

/// Precomputed grids for repeated evaluation at one truncation `k` and
/// quadrature size `m`.
#[derive(Debug, Clone)]
pub struct LoopFunctional {
    periodic: SampleGrid,
    segment: SampleGrid,
}

impl LoopFunctional {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k < 1 || m < 2 {
            return Err(Error::invalid(format!("need k >= 1 and M >= 2 (got k={k}, M={m})")));
        }
        Ok(Self {
            periodic: SampleGrid::periodic(k, m),
            segment: SampleGrid::segment(k, m),
        })
    }

    pub fn k(&self) -> usize {
        self.periodic.k()
    }

    pub fn m(&self) -> usize {
        self.periodic.len()
    }

    fn check(&self, x: &FourierLoop) -> Result<()> {
        if x.k() != self.k() {
            return Err(Error::invalid(format!(
                "loop has k={} but functional was built for k={}",
                x.k(),
                self.k()
            )));
        }
        Ok(())
    }

    /// Exact kinetic action over one period.
    pub fn kinetic(x: &FourierLoop) -> f64 {
        let mut s = 0.0;
        for l in 1..=x.k() {
            let l2 = (l * l) as f64;
            let f = l2 / (1.0 + l2);
            for j in 0..4 {
                s += f * (x.xi()[l][j].powi(2) + x.eta()[l][j].powi(2));
            }
        }
        0.5 * s
    }

    fn force_samples(&self, x: &FourierLoop, eps: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let q = self.periodic.positions(x);
        let mut u = Vec::with_capacity(q.len());
        let mut w = Vec::with_capacity(q.len());
        for (i, qi) in q.iter().enumerate() {
            let (a, b) = force_functions(&Configuration::from_components(*qi))
                .map_err(|e| at_time(e, self.periodic.times()[i]))?;
            u.push(a);
            w.push(eps * b);
        }
        Ok((u, w))
    }

    /// Action over `[0, 2pi]`.
    pub fn loop_action(&self, x: &FourierLoop, eps: f64) -> Result<ActionValue> {
        check_eps(eps)?;
        self.check(x)?;
        let (u, w) = self.force_samples(x, eps)?;
        Ok(ActionValue::new(
            Self::kinetic(x),
            periodic_trapezoid(&u, TAU),
            periodic_trapezoid(&w, TAU),
        ))
    }

    /// Action over `[0, pi/4]`.
    pub fn segment_action(&self, x: &FourierLoop, eps: f64) -> Result<ActionValue> {
        check_eps(eps)?;
        self.check(x)?;
        let q = self.segment.positions(x);
        let v = self.segment.velocities(x);
        let times = self.segment.times();
        path_action_sampled(&q, &v, times, eps)
    }

    /// H^1 gradient of [`Self::loop_action`] in coefficient coordinates.
    pub fn gradient(&self, x: &FourierLoop, eps: f64) -> Result<FourierLoop> {
        check_eps(eps)?;
        self.check(x)?;
        let k = self.k();
        let m = self.m();
        let q = self.periodic.positions(x);
        let mut g = FourierLoop::zeros(k);
        let mut gs = vec![[0.0; 4]; k + 1];
        let mut gc = vec![[0.0; 4]; k + 1];
        for (i, qi) in q.iter().enumerate() {
            let [a, b] = force_gradient(&Configuration::from_components(*qi), eps)
                .map_err(|e| at_time(e, self.periodic.times()[i]))?;
            let f = [a.x, a.y, b.x, b.y];
            let (s, c) = (self.periodic.sin_row(i), self.periodic.cos_row(i));
            for l in 0..=k {
                for j in 0..4 {
                    gs[l][j] += f[j] * s[l];
                    gc[l][j] += f[j] * c[l];
                }
            }
        }
        let w = TAU / m as f64;
        for l in 0..=k {
            let l2 = (l * l) as f64;
            let kf = l2 / (1.0 + l2);
            for j in 0..4 {
                g.set_xi(l, j, kf * x.xi()[l][j] + w * gs[l][j]);
                g.set_eta(l, j, kf * x.eta()[l][j] + w * gc[l][j]);
            }
        }
        Ok(g)
    }

    /// Smallest reduced distance on the periodic quadrature grid.
    pub fn grid_min_separation(&self, x: &FourierLoop) -> f64 {
        self.periodic
            .positions(x)
            .iter()
            .map(|q| Configuration::from_components(*q).min_distance())
            .fold(f64::INFINITY, f64::min)
    }
}

fn path_action_sampled(
    q: &[[f64; 4]],
    v: &[[f64; 4]],
    times: &[f64],
    eps: f64,
) -> Result<ActionValue> {
    let mut kin = Vec::with_capacity(q.len());
    let mut pot = Vec::with_capacity(q.len());
    let mut strong = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        let (u, w) = force_functions(&Configuration::from_components(q[i]))
            .map_err(|e| at_time(e, times[i]))?;
        kin.push(0.5 * v[i].iter().map(|a| a * a).sum::<f64>());
        pot.push(u);
        strong.push(eps * w);
    }
    Ok(ActionValue::new(
        composite_simpson(&kin, 0.0, FRAC_PI_4)?,
        composite_simpson(&pot, 0.0, FRAC_PI_4)?,
        composite_simpson(&strong, 0.0, FRAC_PI_4)?,
    ))
}

/// One-shot [`LoopFunctional::segment_action`].
pub fn action_segment(x: &FourierLoop, eps: f64, m: usize) -> Result<ActionValue> {
    LoopFunctional::new(x.k(), m)?.segment_action(x, eps)
}

/// One-shot [`LoopFunctional::loop_action`].
pub fn action_loop(x: &FourierLoop, eps: f64, m: usize) -> Result<ActionValue> {
    LoopFunctional::new(x.k(), m)?.loop_action(x, eps)
}

/// One-shot [`LoopFunctional::gradient`].
pub fn gradient(x: &FourierLoop, eps: f64, m: usize) -> Result<FourierLoop> {
    LoopFunctional::new(x.k(), m)?.gradient(x, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathspace::random_init;
    use crate::symmetry::{act_on_loop, build_group, equivariant_project};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_direction(k: usize, rng: &mut ChaCha8Rng) -> FourierLoop {
        let mut d = FourierLoop::zeros(k);
        for l in 0..=k {
            for j in 0..4 {
                d.set_xi(l, j, rng.random_range(-1.0..1.0) / (1 + l) as f64);
                d.set_eta(l, j, rng.random_range(-1.0..1.0) / (1 + l) as f64);
            }
        }
        d
    }

    #[test]
    fn total_is_sum_of_parts() {
        let x = random_init(2, 8, 1.0).unwrap();
        let a = action_loop(&x, 0.05, 256).unwrap();
        assert!((a.total - (a.kinetic + a.potential + a.strong_force)).abs() < 1e-12);
    }

    #[test]
    fn loop_is_eight_segments() {
        for seed in 0..3 {
            let x = random_init(seed, 10, 1.0).unwrap();
            let f = LoopFunctional::new(10, 2048).unwrap();
            let l = f.loop_action(&x, 0.0).unwrap().total;
            let s = f.segment_action(&x, 0.0).unwrap().total;
            assert!((l - 8.0 * s).abs() < 1e-9, "{l} vs {}", 8.0 * s);
        }
    }

    #[test]
    fn strong_force_raises_action() {
        let x = random_init(4, 8, 1.0).unwrap();
        let f = LoopFunctional::new(8, 256).unwrap();
        assert!(f.segment_action(&x, 0.1).unwrap().total > f.segment_action(&x, 0.0).unwrap().total);
    }

    #[test]
    fn homogeneity_under_dilation() {
        let x = random_init(6, 8, 1.0).unwrap();
        let f = LoopFunctional::new(8, 512).unwrap();
        let a = f.loop_action(&x, 0.0).unwrap();
        let b = f.loop_action(&x.scaled(2.0), 0.0).unwrap();
        assert!((b.kinetic - 4.0 * a.kinetic).abs() < 1e-12 * b.kinetic);
        assert!((b.potential - 0.5 * a.potential).abs() < 1e-12 * a.potential);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = LoopFunctional::new(8, 256).unwrap();
        let x = random_init(9, 8, 1.0).unwrap();
        for eps in [0.0, 0.01] {
            let g = f.gradient(&x, eps).unwrap();
            for _ in 0..10 {
                let d = random_direction(8, &mut rng).scaled(0.05);
                let h = 1e-6;
                let mut xp = x.clone();
                xp.axpy(h, &d);
                let mut xm = x.clone();
                xm.axpy(-h, &d);
                let fd = (f.loop_action(&xp, eps).unwrap().total
                    - f.loop_action(&xm, eps).unwrap().total)
                    / (2.0 * h);
                let an = g.h1_inner(&d);
                assert!((fd - an).abs() < 1e-6 * an.abs().max(1e-3), "{fd} vs {an}");
            }
        }
    }

    #[test]
    fn action_is_group_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = LoopFunctional::new(8, 512).unwrap();
        let x = random_init(1, 8, 1.0).unwrap();
        let mut y = x.clone();
        y.axpy(0.05, &random_direction(8, &mut rng));
        let base = f.loop_action(&y, 0.0).unwrap().total;
        for g in build_group().elements() {
            let v = f.loop_action(&act_on_loop(g, &y), 0.0).unwrap().total;
            assert!((v - base).abs() < 1e-10);
        }
        let g = f.gradient(&x, 0.0).unwrap();
        assert!((equivariant_project(&g).h1_norm() - g.h1_norm()).abs() < 1e-10);
    }

    #[test]
    fn collision_reports_time() {
        let x = FourierLoop::zeros(3);
        let err = action_loop(&x, 0.0, 16).unwrap_err();
        assert!(matches!(err, Error::Collision { time: Some(_), .. }));
    }
}
