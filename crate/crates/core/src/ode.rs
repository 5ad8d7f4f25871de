//! Adaptive Dormand–Prince 5(4) integrator on fixed-size state arrays.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |h|; `f64::INFINITY` disables it.
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 2_000_000,
            h_max: f64::INFINITY,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combo<const N: usize>(y: &[f64; N], h: f64, ks: &[&[f64; N]], coef: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &a) in ks.iter().zip(coef) {
        if a != 0.0 {
            for i in 0..N {
                out[i] += h * a * k[i];
            }
        }
    }
    out
}

fn err_norm<const N: usize>(y: &[f64; N], y1: &[f64; N], e: &[f64; N], o: &OdeOptions) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y[i].abs().max(y1[i].abs());
        s += (e[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at every
/// entry of `t_out`, which must be monotone in one direction away from `t0`.
///
/// `guard` runs after every accepted step; returning an error aborts.
pub fn integrate<const N: usize, F, G>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_out: &[f64],
    opts: &OdeOptions,
    mut guard: G,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: FnMut(f64, &[f64; N]) -> Result<()>,
{
    if t_out.is_empty() {
        return Ok(Vec::new());
    }
    let dir = {
        let last = t_out[t_out.len() - 1];
        if last >= t0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut prev = t0;
    for &t in t_out {
        if !t.is_finite() || dir * (t - prev) < 0.0 {
            return Err(Error::invalid("output times must be finite and monotone"));
        }
        prev = t;
    }

    let mut out = Vec::with_capacity(t_out.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = dir * initial_step(&mut f, t, &y, &k1, opts)?.min(opts.h_max);
    let mut steps = 0usize;
    let mut rejected_last = false;

    for &target in t_out {
        while dir * (target - t) > 0.0 {
            if steps >= opts.max_steps {
                return Err(Error::Integration {
                    time: t,
                    reason: format!("step budget of {} exhausted", opts.max_steps),
                });
            }
            let remaining = target - t;
            let clamped = dir * h >= dir * remaining;
            let step = if clamped { remaining } else { h };

            let k2 = f(t + C[1] * step, &combo(&y, step, &[&k1], &A2))?;
            let k3 = f(t + C[2] * step, &combo(&y, step, &[&k1, &k2], &A3))?;
            let k4 = f(t + C[3] * step, &combo(&y, step, &[&k1, &k2, &k3], &A4))?;
            let k5 = f(t + C[4] * step, &combo(&y, step, &[&k1, &k2, &k3, &k4], &A5))?;
            let k6 = f(
                t + C[5] * step,
                &combo(&y, step, &[&k1, &k2, &k3, &k4, &k5], &A6),
            )?;
            let y1 = combo(&y, step, &[&k1, &k2, &k3, &k4, &k5, &k6], &B[..6]);
            let t1 = if clamped { target } else { t + step };
            let k7 = f(t1, &y1)?;
            let mut e = [0.0; N];
            let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
            for (k, &c) in ks.iter().zip(&E) {
                for i in 0..N {
                    e[i] += step * c * k[i];
                }
            }
            let err = err_norm(&y, &y1, &e, opts);
            steps += 1;

            if !err.is_finite() {
                h *= 0.2;
                rejected_last = true;
                if h.abs() < 1e-15 * t.abs().max(1.0) {
                    return Err(Error::Integration {
                        time: t,
                        reason: "non-finite error estimate".into(),
                    });
                }
                continue;
            }

            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if err <= 1.0 {
                t = t1;
                y = y1;
                k1 = k7;
                guard(t, &y)?;
                if rejected_last {
                    fac = fac.min(1.0);
                }
                rejected_last = false;
                // a clamped step says nothing about the natural size
                if !clamped || fac < 1.0 {
                    h = step * fac;
                }
            } else {
                h = step * fac.min(1.0);
                rejected_last = true;
            }
            if h.abs() > opts.h_max {
                h = dir * opts.h_max;
            }
            if h.abs() < 1e-15 * t.abs().max(1.0) {
                return Err(Error::Integration {
                    time: t,
                    reason: "step size underflow".into(),
                });
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    o: &OdeOptions,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let scale = |i: usize| o.atol + o.rtol * y[i].abs();
    let rms = |v: &dyn Fn(usize) -> f64| {
        ((0..N).map(|i| (v(i) / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt()
    };
    let d0 = rms(&|i| y[i]);
    let d1 = rms(&|i| f0[i]);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(t + h0, &y1)?;
    let d2 = rms(&|i| f1[i] - f0[i]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1))
}
