//! Truncated trigonometric loops, sampling grids and quadrature.
//!
//! Component `j` of a loop (ordered `q1x, q1y, q2x, q2y`) is
//!
//! ```text
//! q_j(t) = sum_l xi[l][j] sin(l t)/n_l + eta[l][j] cos(l t)/n_l,
//! n_0 = sqrt(2 pi),  n_l = sqrt(pi (1 + l^2))
//! ```
//!
//! which is an orthonormal basis of `H^1(R/2piZ)`, so the H^1 inner product
//! of two loops is the Euclidean inner product of their coefficients.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Configuration, Vec2};
use crate::error::{Error, Result};
use crate::symmetry;

/// Coefficients of one mode, one per component.
pub type Mode = [f64; 4];

/// Normalization `n_l` of the `l`-th basis pair.
pub fn basis_norm(l: usize) -> f64 {
    if l == 0 {
        TAU.sqrt()
    } else {
        (PI * (1.0 + (l * l) as f64)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierLoop {
    xi: Vec<Mode>,
    eta: Vec<Mode>,
}

impl FourierLoop {
    pub fn zeros(k: usize) -> Self {
        Self {
            xi: vec![[0.0; 4]; k + 1],
            eta: vec![[0.0; 4]; k + 1],
        }
    }

    /// Builds a loop from coefficient tables of equal length `k + 1`.
    /// `xi[0]` multiplies `sin(0 t)` and must vanish.
    pub fn from_coefficients(xi: Vec<Mode>, eta: Vec<Mode>) -> Result<Self> {
        if xi.len() != eta.len() || xi.len() < 2 {
            return Err(Error::invalid(format!(
                "coefficient tables must have equal length >= 2 (got {} and {})",
                xi.len(),
                eta.len()
            )));
        }
        if xi[0].iter().any(|&v| v != 0.0) {
            return Err(Error::invalid("xi[0] must be zero"));
        }
        if xi.iter().chain(&eta).flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(Self { xi, eta })
    }

    /// Truncation order.
    pub fn k(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn xi(&self) -> &[Mode] {
        &self.xi
    }

    pub fn eta(&self) -> &[Mode] {
        &self.eta
    }

    pub fn set_xi(&mut self, l: usize, j: usize, v: f64) {
        if l > 0 {
            self.xi[l][j] = v;
        }
    }

    pub fn set_eta(&mut self, l: usize, j: usize, v: f64) {
        self.eta[l][j] = v;
    }

    pub(crate) fn xi_mut(&mut self) -> &mut [Mode] {
        &mut self.xi
    }

    pub(crate) fn eta_mut(&mut self) -> &mut [Mode] {
        &mut self.eta
    }

    /// Same loop at a different truncation (zero-padded or cut).
    pub fn resized(&self, k: usize) -> Self {
        let mut out = Self::zeros(k);
        for l in 0..=k.min(self.k()) {
            out.xi[l] = self.xi[l];
            out.eta[l] = self.eta[l];
        }
        out
    }

    fn coeffs(&self) -> impl Iterator<Item = &f64> {
        self.xi.iter().chain(&self.eta).flatten()
    }

    fn coeffs_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.xi.iter_mut().chain(self.eta.iter_mut()).flatten()
    }

    pub fn h1_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.k(), other.k(), "truncation mismatch");
        self.coeffs().zip(other.coeffs()).map(|(a, b)| a * b).sum()
    }

    pub fn h1_norm(&self) -> f64 {
        self.h1_inner(self).sqrt()
    }

    /// Largest coefficient difference.
    pub fn coeff_sup_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.k(), other.k(), "truncation mismatch");
        self.coeffs()
            .zip(other.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs_mut().for_each(|v| *v *= s);
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        assert_eq!(self.k(), other.k(), "truncation mismatch");
        for (x, y) in self.coeffs_mut().zip(other.coeffs()) {
            *x += a * y;
        }
    }

    fn synth(&self, t: f64, order: u8) -> Mode {
        let mut q = [0.0; 4];
        for l in 0..=self.k() {
            let lf = l as f64;
            let (s, c) = (lf * t).sin_cos();
            let n = basis_norm(l);
            // d/dt rotates (sin, cos) -> (l cos, -l sin)
            let (ws, wc) = match order {
                0 => (s, c),
                1 => (lf * c, -lf * s),
                _ => (-lf * lf * s, -lf * lf * c),
            };
            for j in 0..4 {
                q[j] += (self.xi[l][j] * ws + self.eta[l][j] * wc) / n;
            }
        }
        q
    }

    pub fn evaluate(&self, t: f64) -> Configuration {
        Configuration::from_components(self.synth(t, 0))
    }

    pub fn evaluate_velocity(&self, t: f64) -> (Vec2, Vec2) {
        let v = self.synth(t, 1);
        (Vec2::new(v[0], v[1]), Vec2::new(v[2], v[3]))
    }

    pub fn evaluate_acceleration(&self, t: f64) -> (Vec2, Vec2) {
        let a = self.synth(t, 2);
        (Vec2::new(a[0], a[1]), Vec2::new(a[2], a[3]))
    }

    /// Minimum of the four reduced distances over `n` uniform times in `[0, 2pi)`.
    pub fn min_separation(&self, n: usize) -> f64 {
        let grid = SampleGrid::periodic(self.k(), n);
        grid.positions(self)
            .iter()
            .map(|q| Configuration::from_components(*q).min_distance())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Tables `sin(l t_i)/n_l`, `cos(l t_i)/n_l` on a fixed set of sample times.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    k: usize,
    times: Vec<f64>,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

/// `(cos, sin)` of `2 pi j / n` with exact zeros and ones at quarter turns.
fn unit_circle(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for j in 0..n {
        if (4 * j) % n == 0 {
            let (cq, sq) = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][4 * j / n];
            c.push(cq);
            s.push(sq);
        } else {
            let (sv, cv) = (TAU * j as f64 / n as f64).sin_cos();
            c.push(cv);
            s.push(sv);
        }
    }
    (c, s)
}

impl SampleGrid {
    /// Times `t_i = l 2pi i / n` stepping through a base circle of `n_base`
    /// points; `count` samples starting at `t = 0`.
    fn build(k: usize, n_base: usize, count: usize) -> Self {
        let (cb, sb) = unit_circle(n_base);
        let norms: Vec<f64> = (0..=k).map(basis_norm).collect();
        let mut sin = Vec::with_capacity(count * (k + 1));
        let mut cos = Vec::with_capacity(count * (k + 1));
        let mut times = Vec::with_capacity(count);
        for i in 0..count {
            times.push(TAU * i as f64 / n_base as f64);
            for l in 0..=k {
                let idx = (l * i) % n_base;
                sin.push(sb[idx] / norms[l]);
                cos.push(cb[idx] / norms[l]);
            }
        }
        Self { k, times, sin, cos }
    }

    /// `m` uniform points on `[0, 2pi)` for the trapezoid rule.
    pub fn periodic(k: usize, m: usize) -> Self {
        Self::build(k, m, m)
    }

    /// `m + 1` uniform points on `[0, pi/4]` for composite Simpson.
    pub fn segment(k: usize, m: usize) -> Self {
        Self::build(k, 8 * m, m + 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Row `i` of the scaled sine table.
    pub(crate) fn sin_row(&self, i: usize) -> &[f64] {
        &self.sin[i * (self.k + 1)..(i + 1) * (self.k + 1)]
    }

    pub(crate) fn cos_row(&self, i: usize) -> &[f64] {
        &self.cos[i * (self.k + 1)..(i + 1) * (self.k + 1)]
    }

    fn check(&self, x: &FourierLoop) {
        assert_eq!(self.k, x.k(), "grid built for a different truncation");
    }

    pub fn positions(&self, x: &FourierLoop) -> Vec<Mode> {
        self.check(x);
        (0..self.len())
            .map(|i| {
                let (s, c) = (self.sin_row(i), self.cos_row(i));
                let mut q = [0.0; 4];
                for l in 0..=self.k {
                    for j in 0..4 {
                        q[j] += x.xi[l][j] * s[l] + x.eta[l][j] * c[l];
                    }
                }
                q
            })
            .collect()
    }

    pub fn velocities(&self, x: &FourierLoop) -> Vec<Mode> {
        self.check(x);
        (0..self.len())
            .map(|i| {
                let (s, c) = (self.sin_row(i), self.cos_row(i));
                let mut v = [0.0; 4];
                for l in 1..=self.k {
                    let lf = l as f64;
                    for j in 0..4 {
                        v[j] += lf * (x.xi[l][j] * c[l] - x.eta[l][j] * s[l]);
                    }
                }
                v
            })
            .collect()
    }
}

/// Trapezoid rule for a periodic integrand sampled at `values.len()` uniform
/// points of a period of length `length`.
pub fn periodic_trapezoid(values: &[f64], length: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    length / values.len() as f64 * values.iter().sum::<f64>()
}

/// Composite Simpson on uniform samples including both endpoints of `[a, b]`.
/// An odd interval count closes with the 3/8 rule on the last three intervals.
pub fn composite_simpson(values: &[f64], a: f64, b: f64) -> Result<f64> {
    let n = values.len().saturating_sub(1);
    if n < 2 {
        return Err(Error::invalid("Simpson quadrature needs at least 3 samples"));
    }
    let h = (b - a) / n as f64;
    let simpson = |v: &[f64]| {
        let m = v.len() - 1;
        let mut s = v[0] + v[m];
        for (i, x) in v.iter().enumerate().take(m).skip(1) {
            s += if i % 2 == 1 { 4.0 * x } else { 2.0 * x };
        }
        s * h / 3.0
    };
    if n % 2 == 0 {
        return Ok(simpson(values));
    }
    if n == 3 {
        return Ok(3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]));
    }
    let tail = &values[n - 3..];
    Ok(simpson(&values[..=n - 3])
        + 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]))
}

/// Random H-fixed loop strictly inside the admissible sign region.
///
/// Coefficients are drawn uniformly in `[-amplitude, amplitude] / max(l,1)^2`,
/// projected onto the fixed subspace, and reflected (`R_x`, `R_y` applied to
/// both bodies commute with the group) so that `P_y q1(0) >= 0` and
/// `P_x q2(0) >= 0`. Draws whose values at `t = pi/4` miss the remaining two
/// sign conditions are discarded and redrawn from the same stream.
pub fn random_init(seed: u64, k: usize, amplitude: f64) -> Result<FourierLoop> {
    if k == 0 || !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid("random_init needs k >= 1 and amplitude > 0"));
    }
    let group = symmetry::group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 100_000;
    for _ in 0..ATTEMPTS {
        let mut x = FourierLoop::zeros(k);
        for l in 0..=k {
            let s = amplitude / (l.max(1) * l.max(1)) as f64;
            for j in 0..4 {
                if l > 0 {
                    x.xi[l][j] = s * rng.random_range(-1.0..=1.0);
                }
                x.eta[l][j] = s * rng.random_range(-1.0..=1.0);
            }
        }
        let mut x = group.project(&x);
        let r = symmetry::boundary_residual(&x);
        if r.q1y_at_zero < 0.0 {
            x = symmetry::reflect(&x, false);
        }
        if r.q2x_at_zero < 0.0 {
            x = symmetry::reflect(&x, true);
        }
        if symmetry::boundary_residual(&x).omega_strict() {
            return Ok(x);
        }
    }
    Err(Error::invalid(format!(
        "no admissible draw in {ATTEMPTS} attempts for seed {seed}"
    )))
}
