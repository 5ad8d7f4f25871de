//! The 16-element group `H = Z2 x D8` acting on reduced loops.
//!
//! An element carries `tau` (acting on the time circle), `rho` (acting on
//! the plane) and `sigma` (a permutation of the four bodies). It acts by
//!
//! ```text
//! (g.q)_i(t) = rho(g) q_{sigma(g)^-1(i)}(phi_g(t))
//! ```
//!
//! where `phi_g` is the circle map induced by `tau(g^-1)`. The time circle is
//! embedded as `e(t) = (cos t, -sin t)`; with this orientation the fixed
//! loops satisfy `q2(t) = q1(t + pi/2)` and `q1(t) = R_x q2(pi/2 - t)`, which
//! makes the end condition at `t = pi/4` read `q2(pi/4) = R_x q1(pi/4)`.
//!
//! Bodies 3 and 4 are not stored: `q3 = -q1`, `q4 = -q2`.

use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;

use nalgebra::Matrix2;

use crate::dynamics::{Configuration, Vec2};
use crate::error::{BoundaryCondition, Error, Result};
use crate::pathspace::{basis_norm, FourierLoop, Mode};

pub type Mat2 = Matrix2<f64>;

pub fn p_x(v: &Vec2) -> f64 {
    v.x
}

pub fn p_y(v: &Vec2) -> f64 {
    v.y
}

/// Reflection across the x-axis, `(x, y) -> (x, -y)`.
pub fn r_x() -> Mat2 {
    Mat2::new(1.0, 0.0, 0.0, -1.0)
}

/// Reflection across the y-axis, `(x, y) -> (-x, y)`.
pub fn r_y() -> Mat2 {
    Mat2::new(-1.0, 0.0, 0.0, 1.0)
}

/// Circle map `t -> eps t + quarter_turns pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeMap {
    pub reversed: bool,
    pub quarter_turns: u8,
}

impl TimeMap {
    pub fn apply(&self, t: f64) -> f64 {
        let s = if self.reversed { -t } else { t };
        s + self.quarter_turns as f64 * std::f64::consts::FRAC_PI_2
    }

    /// Circle map of a matrix that is a rotation or reflection by a
    /// multiple of `pi/2`.
    fn of_matrix(t: &Mat2) -> Self {
        let det = t.determinant();
        let theta = (-t[(1, 0)]).atan2(t[(0, 0)]);
        let q = (theta / std::f64::consts::FRAC_PI_2).round() as i64;
        Self {
            reversed: det < 0.0,
            quarter_turns: q.rem_euclid(4) as u8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub tau: Mat2,
    pub rho: Mat2,
    /// `sigma[i]` is the image of body `i` (zero-based).
    pub sigma: [usize; 4],
}

impl GroupElement {
    pub fn identity() -> Self {
        Self {
            tau: Mat2::identity(),
            rho: Mat2::identity(),
            sigma: [0, 1, 2, 3],
        }
    }

    /// `self * other`, i.e. act by `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut sigma = [0; 4];
        for (i, s) in sigma.iter_mut().enumerate() {
            *s = self.sigma[other.sigma[i]];
        }
        Self {
            tau: self.tau * other.tau,
            rho: self.rho * other.rho,
            sigma,
        }
    }

    pub fn inverse(&self) -> Self {
        let mut sigma = [0; 4];
        for (i, &s) in self.sigma.iter().enumerate() {
            sigma[s] = i;
        }
        Self {
            tau: self.tau.transpose(),
            rho: self.rho.transpose(),
            sigma,
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sigma == other.sigma
            && (self.tau - other.tau).amax() <= tol
            && (self.rho - other.rho).amax() <= tol
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let id = Mat2::identity();
        (self.tau.transpose() * self.tau - id).amax() <= tol
            && (self.rho.transpose() * self.rho - id).amax() <= tol
    }

    /// The reparametrization `phi_g` used in the action.
    pub fn time_map(&self) -> TimeMap {
        TimeMap::of_matrix(&self.tau.transpose())
    }

    /// Spatial part of the action: `rho q_{sigma^-1(i)}` for `i = 1, 2`,
    /// read from the lifted bodies.
    pub fn act_on_configuration(&self, c: &Configuration) -> Configuration {
        let bodies = c.lift();
        let inv = self.inverse().sigma;
        Configuration::new(self.rho * bodies[inv[0]], self.rho * bodies[inv[1]])
    }
}

/// `tau = Id, rho = -Id, sigma = (13)(24)`.
pub fn g1() -> GroupElement {
    GroupElement {
        tau: Mat2::identity(),
        rho: -Mat2::identity(),
        sigma: [2, 3, 0, 1],
    }
}

/// `tau = diag(1, -1), rho = R_y, sigma = (24)`.
pub fn g2() -> GroupElement {
    GroupElement {
        tau: Mat2::new(1.0, 0.0, 0.0, -1.0),
        rho: r_y(),
        sigma: [0, 3, 2, 1],
    }
}

/// `tau` = quarter rotation, `rho = Id`, `sigma = (1234)`.
pub fn g3() -> GroupElement {
    GroupElement {
        tau: Mat2::new(0.0, -1.0, 1.0, 0.0),
        rho: Mat2::identity(),
        sigma: [1, 2, 3, 0],
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    elements: Vec<GroupElement>,
}

const MATCH_TOL: f64 = 1e-12;

impl SymmetryGroup {
    /// Closure of the identity under right multiplication by `gens`.
    pub fn generated_by(gens: &[GroupElement]) -> Self {
        let mut elements = vec![GroupElement::identity()];
        let mut frontier = 0;
        while frontier < elements.len() {
            let e = elements[frontier];
            for g in gens {
                let n = e.compose(g);
                if !elements.iter().any(|x| x.approx_eq(&n, MATCH_TOL)) {
                    elements.push(n);
                }
            }
            frontier += 1;
        }
        Self { elements }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.iter().any(|e| e.approx_eq(g, MATCH_TOL))
    }

    /// Group average `(1/|G|) sum_g g.x`.
    pub fn project(&self, x: &FourierLoop) -> FourierLoop {
        let mut acc = FourierLoop::zeros(x.k());
        for g in &self.elements {
            acc.axpy(1.0, &act_on_loop(g, x));
        }
        acc.scale(1.0 / self.elements.len() as f64);
        acc
    }
}

pub fn build_group() -> SymmetryGroup {
    SymmetryGroup::generated_by(&[g1(), g2(), g3()])
}

/// Shared instance of `H`.
pub fn group() -> &'static SymmetryGroup {
    static H: OnceLock<SymmetryGroup> = OnceLock::new();
    H.get_or_init(build_group)
}

pub fn equivariant_project(x: &FourierLoop) -> FourierLoop {
    group().project(x)
}

/// `(cos(l theta), sin(l theta))` for `theta = m pi/2`, exact.
fn quarter_phase(l: usize, m: u8) -> (f64, f64) {
    [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][(l * m as usize) % 4]
}

/// Exact action in coefficient space.
pub fn act_on_loop(g: &GroupElement, x: &FourierLoop) -> FourierLoop {
    let tm = g.time_map();
    let eps = if tm.reversed { -1.0 } else { 1.0 };
    let inv = g.inverse().sigma;
    let mut out = FourierLoop::zeros(x.k());
    for l in 0..=x.k() {
        let (c, s) = quarter_phase(l, tm.quarter_turns);
        // coefficients of f(phi(t)) for each stored component
        let mut a = [0.0; 4];
        let mut b = [0.0; 4];
        for j in 0..4 {
            let (aj, bj) = (x.xi()[l][j], x.eta()[l][j]);
            a[j] = eps * (aj * c - bj * s);
            b[j] = aj * s + bj * c;
        }
        if l == 0 {
            a = [0.0; 4];
        }
        for i in 0..2 {
            let src = inv[i];
            let base = 2 * (src % 2);
            let sign = if src >= 2 { -1.0 } else { 1.0 };
            let ra = sign * (g.rho * Vec2::new(a[base], a[base + 1]));
            let rb = sign * (g.rho * Vec2::new(b[base], b[base + 1]));
            out.xi_mut()[l][2 * i] = ra.x;
            out.xi_mut()[l][2 * i + 1] = ra.y;
            out.eta_mut()[l][2 * i] = rb.x;
            out.eta_mut()[l][2 * i + 1] = rb.y;
        }
    }
    out
}

/// Applies `R_y` (when `about_y`) or `R_x` to both bodies. Both reflections
/// commute with every element of `H`, so fixed loops stay fixed.
pub fn reflect(x: &FourierLoop, about_y: bool) -> FourierLoop {
    let mut out = x.clone();
    let comps: [usize; 2] = if about_y { [0, 2] } else { [1, 3] };
    for l in 0..=x.k() {
        for &j in &comps {
            out.xi_mut()[l][j] = -out.xi()[l][j];
            out.eta_mut()[l][j] = -out.eta()[l][j];
        }
    }
    out
}

/// End-point values that define the admissible segment set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryResidual {
    /// `|P_x q1(0)|`
    pub rhombus_q1x: f64,
    /// `|P_y q2(0)|`
    pub rhombus_q2y: f64,
    /// `|q2(pi/4) - R_x q1(pi/4)|`
    pub rectangle: f64,
    /// `P_y q1(0)`, must be positive
    pub q1y_at_zero: f64,
    /// `P_x q2(0)`, must be positive
    pub q2x_at_zero: f64,
    /// `P_x q1(pi/4)`, must be positive
    pub q1x_at_quarter: f64,
    /// `P_y q1(pi/4)`, must be negative
    pub q1y_at_quarter: f64,
}

impl BoundaryResidual {
    fn from_ends(start: &Configuration, end: &Configuration) -> Self {
        Self {
            rhombus_q1x: p_x(&start.q1).abs(),
            rhombus_q2y: p_y(&start.q2).abs(),
            rectangle: (end.q2 - r_x() * end.q1).norm(),
            q1y_at_zero: p_y(&start.q1),
            q2x_at_zero: p_x(&start.q2),
            q1x_at_quarter: p_x(&end.q1),
            q1y_at_quarter: p_y(&end.q1),
        }
    }

    pub fn equality_max(&self) -> f64 {
        self.rhombus_q1x.max(self.rhombus_q2y).max(self.rectangle)
    }

    /// The four signed values, oriented so that all positive means admissible.
    pub fn omega_signs(&self) -> [f64; 4] {
        [
            self.q1y_at_zero,
            self.q2x_at_zero,
            self.q1x_at_quarter,
            -self.q1y_at_quarter,
        ]
    }

    /// Strict sign conditions of the open admissible set.
    pub fn omega_strict(&self) -> bool {
        self.omega_signs().iter().all(|&s| s > 0.0)
    }

    /// First violated condition at tolerance `tol`, if any.
    pub fn violation(&self, tol: f64) -> Option<(BoundaryCondition, f64)> {
        let rh = self.rhombus_q1x.max(self.rhombus_q2y);
        if rh > tol {
            return Some((BoundaryCondition::Rhomboidal, rh));
        }
        if self.rectangle > tol {
            return Some((BoundaryCondition::Rectangular, self.rectangle));
        }
        let worst = self.omega_signs().into_iter().fold(f64::INFINITY, f64::min);
        if worst < -tol {
            return Some((BoundaryCondition::Sign, -worst));
        }
        None
    }
}

pub fn boundary_residual(x: &FourierLoop) -> BoundaryResidual {
    BoundaryResidual::from_ends(&x.evaluate(0.0), &x.evaluate(FRAC_PI_4))
}

/// Uniform samples of `(q1, q2)` on `[0, pi/4]`, both ends included.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub samples: Vec<Configuration>,
}

impl Segment {
    /// Samples `f` at `n + 1` uniform times.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Configuration) -> Self {
        Self {
            samples: (0..=n).map(|j| f(Self::time(n, j))).collect(),
        }
    }

    fn time(n: usize, j: usize) -> f64 {
        FRAC_PI_4 * j as f64 / n as f64
    }

    pub fn intervals(&self) -> usize {
        self.samples.len().saturating_sub(1)
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.intervals();
        (0..=n).map(|j| Self::time(n, j)).collect()
    }

    pub fn boundary_residual(&self) -> BoundaryResidual {
        BoundaryResidual::from_ends(&self.samples[0], &self.samples[self.intervals()])
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.q1 - b.q1).norm().max((a.q2 - b.q2).norm()))
            .fold(0.0, f64::max)
    }
}

pub fn loop_to_segment(x: &FourierLoop, n: usize) -> Segment {
    Segment::from_fn(n, |t| x.evaluate(t))
}

/// Unfolds a segment over the whole period with the group and returns the
/// trigonometric interpolant of the `8n` unfolded samples, truncated at `k`.
/// With `k >= 4n` the result reproduces every sample.
pub fn segment_to_loop(seg: &Segment, k: usize, tol: f64) -> Result<FourierLoop> {
    let n = seg.intervals();
    if n < 1 || k < 1 {
        return Err(Error::invalid("segment needs at least two samples and k >= 1"));
    }
    if let Some((condition, residual)) = seg.boundary_residual().violation(tol) {
        return Err(Error::Boundary { condition, residual });
    }
    let big_n = 8 * n;
    let maps: Vec<(GroupElement, TimeMap)> = group()
        .elements()
        .iter()
        .map(|g| (*g, g.time_map()))
        .collect();

    let mut values: Vec<Mode> = Vec::with_capacity(big_n);
    for j in 0..big_n {
        let (g, idx) = maps
            .iter()
            .find_map(|(g, tm)| {
                let s = if tm.reversed { big_n - j } else { j };
                let idx = (s + 2 * n * tm.quarter_turns as usize) % big_n;
                (idx <= n).then_some((g, idx))
            })
            .expect("the group's time maps cover the circle");
        let c = g.act_on_configuration(&seg.samples[idx]);
        values.push(c.components());
    }

    let (cb, sb) = {
        let mut c = Vec::with_capacity(big_n);
        let mut s = Vec::with_capacity(big_n);
        for j in 0..big_n {
            let (sv, cv) = (std::f64::consts::TAU * j as f64 / big_n as f64).sin_cos();
            c.push(cv);
            s.push(sv);
        }
        (c, s)
    };
    let mut x = FourierLoop::zeros(k);
    let nyquist = big_n / 2;
    for l in 0..=k.min(nyquist) {
        let w = if l == 0 || l == nyquist { 1.0 } else { 2.0 } / big_n as f64;
        let mut a = [0.0; 4];
        let mut b = [0.0; 4];
        for (j, v) in values.iter().enumerate() {
            let idx = (l * j) % big_n;
            for c in 0..4 {
                a[c] += v[c] * sb[idx];
                b[c] += v[c] * cb[idx];
            }
        }
        let scale = basis_norm(l);
        for c in 0..4 {
            if l > 0 && l < nyquist {
                x.set_xi(l, c, scale * w * a[c]);
            }
            x.set_eta(l, c, scale * w * b[c]);
        }
    }
    Ok(group().project(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathspace::random_init;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sixteen_elements_and_relations() {
        let h = build_group();
        assert_eq!(h.len(), 16);
        let id = GroupElement::identity();
        let pow = |g: GroupElement, n: usize| (0..n).fold(id, |acc, _| acc.compose(&g));
        assert!(pow(g1(), 2).approx_eq(&id, 1e-14));
        assert!(pow(g2(), 2).approx_eq(&id, 1e-14));
        assert!(pow(g3(), 4).approx_eq(&id, 1e-14));
        assert!(pow(g2().compose(&g3()), 2).approx_eq(&id, 1e-14));
        assert!(g1().compose(&g2()).approx_eq(&g2().compose(&g1()), 1e-14));
        assert!(g1().compose(&g3()).approx_eq(&g3().compose(&g1()), 1e-14));
        assert!(!pow(g3(), 2).approx_eq(&id, 1e-14));
    }

    #[test]
    fn sigma_of_g3_cycles_bodies() {
        let s = g3().sigma;
        let image: Vec<usize> = [0, 1, 2, 3].iter().map(|&i| s[i] + 1).collect();
        assert_eq!(image, vec![2, 3, 4, 1]);
    }

    #[test]
    fn closure_and_orthogonality() {
        let h = build_group();
        for a in h.elements() {
            assert!(a.is_orthogonal(1e-14));
            let mut seen = [false; 4];
            a.sigma.iter().for_each(|&s| seen[s] = true);
            assert!(seen.iter().all(|&b| b));
            for b in h.elements() {
                assert!(h.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn time_maps() {
        assert_eq!(
            g3().time_map(),
            TimeMap { reversed: false, quarter_turns: 1 }
        );
        assert_eq!(
            g2().time_map(),
            TimeMap { reversed: true, quarter_turns: 0 }
        );
        assert!((g3().time_map().apply(0.1) - (0.1 + FRAC_PI_2)).abs() < 1e-15);
    }

    #[test]
    fn identity_action_and_action_law() {
        let h = build_group();
        let x = random_init(1, 9, 1.0).unwrap();
        let mut y = x.clone();
        // break symmetry so the action is visible
        y.set_eta(2, 1, 0.3);
        y.set_xi(3, 2, -0.2);
        assert_eq!(act_on_loop(&GroupElement::identity(), &y), y);
        for a in h.elements() {
            for b in h.elements() {
                let lhs = act_on_loop(&a.compose(b), &y);
                let rhs = act_on_loop(a, &act_on_loop(b, &y));
                assert!(lhs.coeff_sup_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn action_matches_pointwise_definition() {
        let mut y = FourierLoop::zeros(5);
        for l in 0..=5 {
            for j in 0..4 {
                y.set_xi(l, j, ((l * 7 + j * 3) % 5) as f64 * 0.1 - 0.2);
                y.set_eta(l, j, ((l * 3 + j * 5) % 7) as f64 * 0.1 - 0.3);
            }
        }
        for g in build_group().elements() {
            let gy = act_on_loop(g, &y);
            let tm = g.time_map();
            for t in [0.0, 0.4, 1.9, 5.0] {
                let want = g.act_on_configuration(&y.evaluate(tm.apply(t)));
                let got = gy.evaluate(t);
                assert!((want.q1 - got.q1).norm() < 1e-13);
                assert!((want.q2 - got.q2).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_fixed() {
        let mut y = FourierLoop::zeros(7);
        for l in 0..=7 {
            for j in 0..4 {
                y.set_xi(l, j, (l as f64 + 1.0).recip() * (j as f64 - 1.5));
                y.set_eta(l, j, 0.2 * (l as f64 - j as f64));
            }
        }
        let p = equivariant_project(&y);
        assert!(equivariant_project(&p).coeff_sup_diff(&p) < 1e-12);
        for g in build_group().elements() {
            assert!(act_on_loop(g, &p).coeff_sup_diff(&p) < 1e-12);
        }
        assert!(p.h1_norm() <= y.h1_norm() + 1e-12);
        for i in 0..64 {
            let t = i as f64 * 0.1;
            let a = p.evaluate(t + FRAC_PI_2).q1;
            assert!((p.evaluate(t).q2 - a).norm() < 1e-10);
            let b = p.evaluate(FRAC_PI_2 - t).q2;
            assert!((p.evaluate(t).q1 - r_x() * b).norm() < 1e-10);
        }
        let r = boundary_residual(&p);
        assert!(r.equality_max() < 1e-12);
    }

    #[test]
    fn rejects_rhomboidal_violation() {
        let seg = Segment::from_fn(8, |t| {
            Configuration::new(
                Vec2::new(0.1 + t, FRAC_PI_4 - 2.0 * t),
                Vec2::new(FRAC_PI_2 - t, t),
            )
        });
        let err = segment_to_loop(&seg, 16, 1e-10).unwrap_err();
        assert!(err.to_string().starts_with("rhomboidal condition violated"));
    }

    #[test]
    fn round_trip_random_admissible() {
        for seed in 0..5 {
            let x = random_init(seed, 6, 1.0).unwrap();
            let seg = loop_to_segment(&x, 12);
            let back = segment_to_loop(&seg, 48, 1e-10).unwrap();
            assert!(loop_to_segment(&back, 12).sup_distance(&seg) < 1e-12);
            assert!(back.resized(6).coeff_sup_diff(&x) < 1e-12);
        }
    }
}
