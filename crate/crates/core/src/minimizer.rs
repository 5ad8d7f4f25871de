//! Projected Sobolev gradient descent with strong-force continuation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{ActionValue, LoopFunctional};
use crate::error::{Error, Result};
use crate::pathspace::{basis_norm, random_init, FourierLoop};
use crate::symmetry::{boundary_residual, group};

/// Grid size used for reported minimum separations.
pub const SEPARATION_GRID: usize = 4096;

/// Loop actions are reported per fundamental segment, i.e. divided by this.
pub const SEGMENTS_PER_PERIOD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub eps_ladder: Vec<f64>,
    pub step: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub collision_floor: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        let mut eps_ladder: Vec<f64> = (0..=16).map(|n| 0.1 * 0.5f64.powi(n)).collect();
        eps_ladder.push(0.0);
        Self {
            eps_ladder,
            step: 0.05,
            max_iters: 20_000,
            grad_tol: 1e-7,
            collision_floor: 1e-4,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let l = &self.eps_ladder;
        if l.is_empty() || *l.last().unwrap() != 0.0 {
            return Err(Error::invalid("eps ladder must end at 0"));
        }
        if l.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::invalid("eps ladder entries must be finite and >= 0"));
        }
        if l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("eps ladder must be strictly decreasing"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid("step must be > 0"));
        }
        if !(self.grad_tol > 0.0) || !(self.collision_floor > 0.0) {
            return Err(Error::invalid("grad_tol and collision_floor must be > 0"));
        }
        Ok(())
    }

    fn params(&self) -> DescentParams {
        DescentParams {
            step: self.step,
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            collision_floor: self.collision_floor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentParams {
    pub step: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub collision_floor: f64,
}

impl Default for DescentParams {
    fn default() -> Self {
        Schedule::default().params()
    }
}

/// One line of the convergence log. `action` is in segment units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterRecord {
    pub rung: usize,
    pub iter: usize,
    pub eps: f64,
    pub action: f64,
    pub grad_norm: f64,
    pub min_sep: f64,
}

#[derive(Debug, Clone)]
pub struct Descent {
    pub path: FourierLoop,
    /// Loop action (full period) at the final iterate.
    pub action: ActionValue,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Step halving hit its floor before the tolerance was reached.
    pub stalled: bool,
    pub trace: Vec<IterRecord>,
}

/// Relative slack on the monotonicity test; differences below this are
/// roundoff in the quadrature sum.
pub const ACCEPT_SLACK: f64 = 64.0 * f64::EPSILON;

/// Iterates `x <- P(x - h grad)` with step halving whenever the action would
/// increase or a sample hits a collision. Steps are also capped so that the
/// displacement stays below half the current minimum separation, which keeps
/// the iterate from jumping across a collision.
pub fn descend(
    f: &LoopFunctional,
    x0: &FourierLoop,
    eps: f64,
    params: &DescentParams,
    rung: usize,
) -> Result<Descent> {
    let h_group = group();
    let mut x = h_group.project(x0);
    let mut a = f.loop_action(&x, eps)?;
    let mut g = h_group.project(&f.gradient(&x, eps)?);
    let mut gn = g.h1_norm();
    let mut min_sep = f.grid_min_separation(&x);
    if min_sep < params.collision_floor {
        return Err(Error::CloseApproach { time: f64::NAN, distance: min_sep });
    }
    let mut h = params.step;
    let h_min = params.step * 2f64.powi(-40);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut stalled = false;

    loop {
        trace.push(IterRecord {
            rung,
            iter: iterations,
            eps,
            action: a.total / SEGMENTS_PER_PERIOD,
            grad_norm: gn,
            min_sep,
        });
        if gn < params.grad_tol || iterations >= params.max_iters {
            break;
        }
        // no reduced distance can reach zero along a step shorter than this
        let cap = 0.5 * min_sep / displacement_bound(&g);
        let mut h_try = h.min(cap);
        let accepted = loop {
            let mut cand = x.clone();
            cand.axpy(-h_try, &g);
            let cand = h_group.project(&cand);
            match f.loop_action(&cand, eps) {
                Ok(ac) => {
                    let noise = ACCEPT_SLACK * a.total.abs();
                    if ac.total < a.total - noise {
                        break Some((cand, ac, None));
                    }
                    // below roundoff the action cannot rank the candidate,
                    // so the gradient norm decides
                    if ac.total <= a.total + noise {
                        let gc = h_group.project(&f.gradient(&cand, eps)?);
                        if gc.h1_norm() < gn {
                            break Some((cand, ac, Some(gc)));
                        }
                    }
                }
                Err(e) if e.is_collision() => {}
                Err(e) => return Err(e),
            }
            h_try *= 0.5;
            h = h.min(h_try);
            if h_try < h_min {
                break None;
            }
        };
        let Some((cand, ac, gc)) = accepted else {
            stalled = true;
            break;
        };
        x = cand;
        a = ac;
        min_sep = f.grid_min_separation(&x);
        if min_sep < params.collision_floor {
            return Err(Error::CloseApproach { time: f64::NAN, distance: min_sep });
        }
        g = match gc {
            Some(gc) => gc,
            None => h_group.project(&f.gradient(&x, eps)?),
        };
        gn = g.h1_norm();
        iterations += 1;
    }
    Ok(Descent {
        path: x,
        action: a,
        grad_norm: gn,
        iterations,
        converged: gn < params.grad_tol,
        stalled,
        trace,
    })
}

/// Upper bound on `sup_t (|dq1(t)| + |dq2(t)|)` for the loop `d`; every
/// reduced distance changes by at most this much when `d` is added.
pub fn displacement_bound(d: &FourierLoop) -> f64 {
    let mut comp = [0.0; 4];
    for l in 0..=d.k() {
        let n = basis_norm(l);
        for (j, c) in comp.iter_mut().enumerate() {
            *c += (d.xi()[l][j].abs() + d.eta()[l][j].abs()) / n;
        }
    }
    comp[0].hypot(comp[1]) + comp[2].hypot(comp[3])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsRecord {
    pub eps: f64,
    /// Regularized action of the rung's minimizer, segment units.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitResult {
    pub path: FourierLoop,
    /// Unregularized action, segment units.
    pub action: ActionValue,
    pub eps_history: Vec<EpsRecord>,
    pub min_separation: f64,
    pub grad_norm: f64,
    /// `P_y q1(0)`, `P_x q2(0)`, `P_x q1(pi/4)`, `-P_y q1(pi/4)`; all positive
    /// inside the admissible set.
    pub omega_signs: [f64; 4],
    pub converged: bool,
    pub quadrature: usize,
    pub seed: Option<u64>,
}

impl OrbitResult {
    pub fn omega_strict(&self) -> bool {
        self.omega_signs.iter().all(|&s| s > 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationRun {
    pub result: OrbitResult,
    pub trace: Vec<IterRecord>,
}

/// Runs [`descend`] on every rung of the ladder, warm-starting each rung from
/// the previous minimizer.
pub fn continuation(
    f: &LoopFunctional,
    x0: &FourierLoop,
    schedule: &Schedule,
) -> Result<ContinuationRun> {
    schedule.validate()?;
    let params = schedule.params();
    let mut x = x0.clone();
    let mut history = Vec::with_capacity(schedule.eps_ladder.len());
    let mut trace = Vec::new();
    let mut last = None;
    for (rung, &eps) in schedule.eps_ladder.iter().enumerate() {
        let d = descend(f, &x, eps, &params, rung).map_err(|e| Error::Rung {
            rung,
            eps,
            source: Box::new(e),
        })?;
        history.push(EpsRecord {
            eps,
            value: d.action.total / SEGMENTS_PER_PERIOD,
        });
        trace.extend_from_slice(&d.trace);
        x = d.path.clone();
        last = Some(d);
    }
    let last = last.expect("ladder is non-empty");
    let min_separation = x.min_separation(SEPARATION_GRID);
    let omega_signs = boundary_residual(&x).omega_signs();
    let result = OrbitResult {
        action: last.action.scaled(1.0 / SEGMENTS_PER_PERIOD),
        eps_history: history,
        min_separation,
        grad_norm: last.grad_norm,
        omega_signs,
        converged: last.converged && min_separation > schedule.collision_floor,
        quadrature: f.m(),
        seed: None,
        path: x,
    };
    Ok(ContinuationRun { result, trace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    pub m: usize,
    pub seeds: Vec<u64>,
    pub amplitude: f64,
    pub schedule: Schedule,
    /// Cap on parallel starts; `None` reads `CHOREO_THREADS`, then uses all cores.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 32,
            m: 2048,
            seeds: (0..8).collect(),
            amplitude: 1.0,
            schedule: Schedule::default(),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("truncation k must be >= 1"));
        }
        if self.m < 4 * self.k + 2 {
            return Err(Error::invalid(format!(
                "quadrature M={} too small for k={} (need M >= 4k + 2)",
                self.m, self.k
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("amplitude must be > 0"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be >= 1"));
        }
        self.schedule.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StartStatus {
    Converged,
    /// Converged outside the admissible sign region; discarded.
    RotatingSquareBasin,
    NotConverged,
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct StartOutcome {
    pub seed: u64,
    pub status: StartStatus,
    pub result: Option<OrbitResult>,
    pub trace: Vec<IterRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basin {
    pub action: f64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct MinimizeReport {
    /// Lowest-action admissible converged result; if none converged, the
    /// lowest-action admissible unconverged one.
    pub best: OrbitResult,
    pub starts: Vec<StartOutcome>,
    pub basins: Vec<Basin>,
}

/// Basin tolerance on the segment action.
pub const BASIN_TOL: f64 = 1e-6;

fn run_start(f: &LoopFunctional, cfg: &RunConfig, seed: u64) -> StartOutcome {
    let run = random_init(seed, cfg.k, cfg.amplitude).and_then(|x0| continuation(f, &x0, &cfg.schedule));
    match run {
        Ok(ContinuationRun { mut result, trace }) => {
            result.seed = Some(seed);
            let status = if !result.omega_strict() {
                StartStatus::RotatingSquareBasin
            } else if result.converged {
                StartStatus::Converged
            } else {
                StartStatus::NotConverged
            };
            StartOutcome {
                seed,
                status,
                result: Some(result),
                trace,
            }
        }
        Err(e) => StartOutcome {
            seed,
            status: StartStatus::Failed(e.to_string()),
            result: None,
            trace: Vec::new(),
        },
    }
}

fn thread_cap(cfg: &RunConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var("CHOREO_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
    })
}

/// Groups actions that lie within [`BASIN_TOL`] of a basin's lowest member.
pub fn group_basins(mut pts: Vec<(f64, u64)>) -> Vec<Basin> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut basins: Vec<Basin> = Vec::new();
    for (a, s) in pts {
        match basins.last_mut() {
            Some(b) if a - b.action <= BASIN_TOL => b.seeds.push(s),
            _ => basins.push(Basin {
                action: a,
                seeds: vec![s],
            }),
        }
    }
    for b in &mut basins {
        b.seeds.sort_unstable();
    }
    basins
}

/// Multi-start driver: one continuation per seed, run in parallel, merged in
/// seed order.
pub fn minimize(cfg: &RunConfig) -> Result<MinimizeReport> {
    cfg.validate()?;
    let f = LoopFunctional::new(cfg.k, cfg.m)?;
    let work = || -> Vec<StartOutcome> {
        cfg.seeds
            .par_iter()
            .map(|&s| run_start(&f, cfg, s))
            .collect()
    };
    let starts = match thread_cap(cfg) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let converged: Vec<&OrbitResult> = starts
        .iter()
        .filter(|s| s.status == StartStatus::Converged)
        .filter_map(|s| s.result.as_ref())
        .collect();
    let basins = group_basins(
        converged
            .iter()
            .map(|r| (r.action.total, r.seed.unwrap_or_default()))
            .collect(),
    );
    let pick = |status: StartStatus| {
        starts
            .iter()
            .filter(|s| s.status == status)
            .filter_map(|s| s.result.as_ref())
            .min_by(|a, b| a.action.total.total_cmp(&b.action.total))
            .cloned()
    };
    let best = pick(StartStatus::Converged).or_else(|| pick(StartStatus::NotConverged));
    match best {
        Some(best) => Ok(MinimizeReport {
            best,
            starts,
            basins,
        }),
        None => {
            let summary = starts
                .iter()
                .map(|s| match &s.status {
                    StartStatus::Failed(m) => format!("seed {}: {m}", s.seed),
                    other => format!("seed {}: {other:?}", s.seed),
                })
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::AllStartsFailed {
                starts: starts.len(),
                summary,
            })
        }
    }
}
