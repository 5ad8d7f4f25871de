//! Command implementations, the orbit file format and exports.
//!
//! Exit codes: 0 success, 2 non-convergence, 3 input error, 4 collision
//! abort.

use std::f64::consts::{FRAC_PI_4, SQRT_2, TAU};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{all_reports, kepler_min_action, total_collision_lower_bound, BoundReport};
use crate::collision::{
    integrate_scaling, integrate_through_collision, quadrant_diagnostic, theta_asymptote, Branch,
    QuadrantSign,
};
use crate::error::{Error, Result};
use crate::minimizer::{minimize, EpsRecord, MinimizeReport, OrbitResult, RunConfig, Schedule, StartStatus};
use crate::action::ActionValue;
use crate::pathspace::{FourierLoop, Mode};
use crate::verify::{residual_report, ResidualReport};

pub const FORMAT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_COLLISION: i32 = 4;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) | Error::Boundary { .. } => EXIT_INPUT,
        Error::Collision { .. }
        | Error::CloseApproach { .. }
        | Error::SecondaryCollision { .. }
        | Error::AllStartsFailed { .. } => EXIT_COLLISION,
        Error::Rung { source, .. } => exit_code(source),
        Error::Integration { .. } => EXIT_NOT_CONVERGED,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub xi: Vec<Mode>,
    pub eta: Vec<Mode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub converged: bool,
    pub min_separation: f64,
    pub grad_norm: f64,
    pub omega_signs: [f64; 4],
    pub kinetic: f64,
    pub potential: f64,
    pub seed: Option<u64>,
}

/// On-disk orbit. Field order is the key order of the JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitFile {
    pub format_version: u32,
    pub period: f64,
    pub truncation: usize,
    pub quadrature: usize,
    pub coefficients: Coefficients,
    /// Segment action of the unregularized problem.
    pub action: f64,
    pub eps_history: Vec<EpsRecord>,
    pub diagnostics: Diagnostics,
}

impl OrbitFile {
    pub fn from_result(r: &OrbitResult) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            period: TAU,
            truncation: r.path.k(),
            quadrature: r.quadrature,
            coefficients: Coefficients {
                xi: r.path.xi().to_vec(),
                eta: r.path.eta().to_vec(),
            },
            action: r.action.total,
            eps_history: r.eps_history.clone(),
            diagnostics: Diagnostics {
                converged: r.converged,
                min_separation: r.min_separation,
                grad_norm: r.grad_norm,
                omega_signs: r.omega_signs,
                kinetic: r.action.kinetic,
                potential: r.action.potential,
                seed: r.seed,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.period != TAU {
            return Err(Error::invalid("period must be 2 pi"));
        }
        let c = &self.coefficients;
        if c.xi.len() != self.truncation + 1 || c.eta.len() != self.truncation + 1 {
            return Err(Error::invalid("coefficient arrays must have truncation + 1 rows"));
        }
        Ok(())
    }

    pub fn path(&self) -> Result<FourierLoop> {
        self.validate()?;
        FourierLoop::from_coefficients(self.coefficients.xi.clone(), self.coefficients.eta.clone())
    }

    pub fn to_result(&self) -> Result<OrbitResult> {
        let d = &self.diagnostics;
        Ok(OrbitResult {
            path: self.path()?,
            action: ActionValue {
                total: self.action,
                kinetic: d.kinetic,
                potential: d.potential,
                strong_force: 0.0,
            },
            eps_history: self.eps_history.clone(),
            min_separation: d.min_separation,
            grad_norm: d.grad_norm,
            omega_signs: d.omega_signs,
            converged: d.converged,
            quadrature: self.quadrature,
            seed: d.seed,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
    Json,
}

pub const EXPORT_COLUMNS: [&str; 9] = ["t", "q1x", "q1y", "q2x", "q2y", "q3x", "q3y", "q4x", "q4y"];

/// `n` uniform samples on `[0, 2pi)` of all four bodies.
pub fn export_rows(x: &FourierLoop, n: usize) -> Vec<[f64; 9]> {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            let b = x.evaluate(t).lift();
            [t, b[0].x, b[0].y, b[1].x, b[1].y, b[2].x, b[2].y, b[3].x, b[3].y]
        })
        .collect()
}

pub fn export_string(x: &FourierLoop, n: usize, format: ExportFormat) -> Result<String> {
    if n == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    let rows = export_rows(x, n);
    Ok(match format {
        ExportFormat::Csv => {
            let mut s = EXPORT_COLUMNS.join(",");
            s.push('\n');
            for r in &rows {
                let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
        ExportFormat::Json => {
            #[derive(Serialize)]
            struct Table<'a> {
                columns: &'a [&'a str],
                rows: &'a [[f64; 9]],
            }
            let mut s = serde_json::to_string(&Table {
                columns: &EXPORT_COLUMNS,
                rows: &rows,
            })?;
            s.push('\n');
            s
        }
    })
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let re: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let im: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_branch(s: &str) -> std::result::Result<Branch, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "supereight", version, about = "Variational search for the super-eight four-body choreography")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collision bounds and the test-path action.
    Bounds {
        #[arg(long)]
        json: bool,
        /// Grid points per angle for the shape-sphere search.
        #[arg(long, default_value_t = 48)]
        resolution: usize,
    },
    /// Multi-start minimization with eps continuation.
    Minimize(MinimizeArgs),
    /// Residuals of an orbit file against direct integration.
    Verify {
        orbit: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Blow-up scaling ODE and its limit angle.
    Scaling {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        d: f64,
        #[arg(long, default_value = "+", value_parser = parse_branch, allow_hyphen_values = true)]
        branch: Branch,
        #[arg(long, default_value_t = 1e3)]
        s_max: f64,
        #[arg(long)]
        json: bool,
    },
    /// Integration through the q1 = 0 collision in Levi-Civita coordinates.
    LeviCivita {
        /// q2 at the collision, as RE,IM.
        #[arg(long, default_value = "1,0", value_parser = parse_complex, allow_hyphen_values = true)]
        q2: Complex64,
        /// p2 at the collision, as RE,IM.
        #[arg(long, default_value = "0,1", value_parser = parse_complex, allow_hyphen_values = true)]
        p2: Complex64,
        #[arg(long, default_value_t = 0.4)]
        tau: f64,
        #[arg(long)]
        json: bool,
    },
    /// Uniform-time samples of all four bodies.
    Export {
        orbit: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: ExportFormat,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MinimizeArgs {
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    #[arg(long, default_value_t = 2048)]
    pub m: usize,
    /// Number of starts; seeds are `first-seed .. first-seed + seeds`.
    #[arg(long, default_value_t = 8)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub grad_tol: f64,
    /// First rung of the eps ladder.
    #[arg(long, default_value_t = 0.1)]
    pub eps0: f64,
    /// Number of halvings after the first rung before the final eps = 0.
    #[arg(long, default_value_t = 16)]
    pub halvings: u32,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short, default_value = "orbit.json")]
    pub output: PathBuf,
    #[arg(long, default_value = "minimize_log.csv")]
    pub log: PathBuf,
}

impl MinimizeArgs {
    pub fn run_config(&self) -> Result<RunConfig> {
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::invalid("eps0 must be > 0"));
        }
        let mut eps_ladder: Vec<f64> = (0..=self.halvings)
            .map(|n| self.eps0 * 0.5f64.powi(n as i32))
            .collect();
        eps_ladder.push(0.0);
        let cfg = RunConfig {
            k: self.k,
            m: self.m,
            seeds: (self.first_seed..self.first_seed + self.seeds).collect(),
            amplitude: self.amplitude,
            schedule: Schedule {
                eps_ladder,
                step: self.step,
                max_iters: self.max_iters,
                grad_tol: self.grad_tol,
                ..Schedule::default()
            },
            threads: self.threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_bounds(json: bool, resolution: usize, out: &mut dyn Write) -> Result<i32> {
    let reports = all_reports(resolution)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "{:<22} {:>18} {:>18} {:>11}", "name", "formula", "oracle", "discrepancy")?;
    for r in &reports {
        writeln!(
            out,
            "{:<22} {:>18.12} {:>18.12} {:>11.3e}",
            r.name, r.formula_value, r.oracle_value, r.discrepancy
        )?;
    }
    let tc = total_collision_lower_bound();
    let kep = kepler_min_action(4.0 + SQRT_2, FRAC_PI_4)?;
    let tp = find(&reports, "test_path_action").oracle_value;
    writeln!(out)?;
    writeln!(out, "total_collision ≈ {tc:.4}")?;
    writeln!(out, "kepler identity: {}", fmt_bool((tc - kep).abs() < 1e-10))?;
    writeln!(out, "test_path < 5: {} ({tp:.10})", fmt_bool(tp < 5.0))?;
    writeln!(out, "test_path < total_collision: {}", fmt_bool(tp < tc))?;
    Ok(EXIT_OK)
}

fn find<'a>(r: &'a [BoundReport], name: &str) -> &'a BoundReport {
    r.iter().find(|b| b.name == name).expect("report row exists")
}

/// Per-iteration log with one `# start` line per seed.
pub fn minimize_log(report: &MinimizeReport) -> String {
    let mut s = String::from("seed,rung,iter,eps,action,grad_norm,min_sep\n");
    for st in &report.starts {
        s.push_str(&format!("# start seed={} status={}\n", st.seed, status_name(&st.status)));
        for r in &st.trace {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                st.seed, r.rung, r.iter, r.eps, r.action, r.grad_norm, r.min_sep
            ));
        }
    }
    s
}

fn status_name(s: &StartStatus) -> String {
    match s {
        StartStatus::Converged => "converged".into(),
        StartStatus::RotatingSquareBasin => "rotating_square_basin".into(),
        StartStatus::NotConverged => "not_converged".into(),
        StartStatus::Failed(m) => format!("failed ({})", m.replace(['\n', ','], " ")),
    }
}

pub fn cmd_minimize(args: &MinimizeArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.run_config()?;
    let report = match minimize(&cfg) {
        Ok(r) => r,
        Err(e) => {
            fs::write(&args.log, format!("# all starts failed: {e}\n"))?;
            return Err(e);
        }
    };
    fs::write(&args.log, minimize_log(&report))?;
    let file = OrbitFile::from_result(&report.best);
    file.write(&args.output)?;
    for st in &report.starts {
        let a = st.result.as_ref().map(|r| format!("{:.12}", r.action.total)).unwrap_or_else(|| "-".into());
        writeln!(out, "seed {:>3}  {:<24} action {a}", st.seed, status_name(&st.status))?;
    }
    for b in &report.basins {
        writeln!(out, "basin {:.10}  seeds {:?}", b.action, b.seeds)?;
    }
    let best = &report.best;
    writeln!(out, "best action {:.12}  converged {}", best.action.total, best.converged)?;
    writeln!(out, "wrote {} and {}", args.output.display(), args.log.display())?;
    Ok(if best.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

pub fn write_residuals(rep: &ResidualReport, json: bool, out: &mut dyn Write) -> Result<()> {
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(rep)?)?;
        return Ok(());
    }
    let rows = [
        ("newton_sup", rep.newton_sup),
        ("energy_drift", rep.energy_drift),
        ("momentum_drift", rep.momentum_drift),
        ("periodicity", rep.periodicity),
        ("choreography", rep.choreography),
        ("symmetry", rep.symmetry),
        ("min_separation", rep.min_separation),
        ("ode_residual", rep.ode_residual),
    ];
    for (name, v) in rows {
        writeln!(out, "{name:<16} {v:.6e}")?;
    }
    Ok(())
}

pub fn cmd_verify(orbit: &Path, tol: f64, json: bool, out: &mut dyn Write) -> Result<i32> {
    let file = OrbitFile::read(orbit)?;
    let result = file.to_result()?;
    if !result.converged {
        writeln!(out, "orbit is not converged")?;
        return Ok(EXIT_NOT_CONVERGED);
    }
    let rep = residual_report(&result, tol)?;
    write_residuals(&rep, json, out)?;
    Ok(if rep.newton_sup.is_finite() { EXIT_OK } else { EXIT_COLLISION })
}

#[derive(Debug, Clone, Serialize)]
struct ScalingSummary {
    d: f64,
    branch: String,
    s_max: f64,
    theta_final: f64,
    theta_extrapolated: f64,
    theta_closed_form: f64,
    energy_drift: f64,
}

pub fn cmd_scaling(d: f64, branch: Branch, s_max: f64, json: bool, out: &mut dyn Write) -> Result<i32> {
    let tr = integrate_scaling(d, branch, s_max, 1e-12)?;
    let s = ScalingSummary {
        d,
        branch: branch.to_string(),
        s_max,
        theta_final: tr.final_theta(),
        theta_extrapolated: tr.extrapolated_theta()?,
        theta_closed_form: theta_asymptote(d, branch),
        energy_drift: tr.energy_drift,
    };
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&s)?)?;
    } else {
        writeln!(out, "d = {d}, branch {branch}, s_max = {s_max}")?;
        writeln!(out, "theta(s_max)        {:.8}", s.theta_final)?;
        writeln!(out, "theta extrapolated  {:.8}", s.theta_extrapolated)?;
        writeln!(out, "closed form         {:.8}", s.theta_closed_form)?;
        writeln!(out, "difference          {:.3e}", (s.theta_extrapolated - s.theta_closed_form).abs())?;
        writeln!(out, "energy drift        {:.3e}", s.energy_drift)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
struct LeviCivitaSummary {
    q2: [f64; 2],
    p2: [f64; 2],
    tau: f64,
    cubic_coefficient: f64,
    max_abs_im_z: f64,
    energy_drift: f64,
    im_b3: Option<f64>,
    transverse: Option<f64>,
    quadrant_sign: Option<String>,
}

pub fn cmd_levi_civita(q2: Complex64, p2: Complex64, tau: f64, json: bool, out: &mut dyn Write) -> Result<i32> {
    let path = integrate_through_collision(q2, p2, tau, 1e-12)?;
    let quad = if p2.norm() > 0.0 {
        Some(quadrant_diagnostic(q2, p2, tau)?)
    } else {
        None
    };
    let s = LeviCivitaSummary {
        q2: [q2.re, q2.im],
        p2: [p2.re, p2.im],
        tau,
        cubic_coefficient: path.cubic_coefficient(tau.min(0.05)),
        max_abs_im_z: path.max_abs_im_z(),
        energy_drift: path.energy_drift(),
        im_b3: quad.map(|q| q.im_b3),
        transverse: quad.map(|q| q.transverse),
        quadrant_sign: quad.map(|q| format!("{:?}", q.sign).to_lowercase()),
    };
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&s)?)?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "q2 = {q2}, p2 = {p2}, |tau| <= {tau}")?;
    writeln!(out, "t / tau^3 near 0     {:.8} (2/3 = {:.8})", s.cubic_coefficient, 2.0 / 3.0)?;
    writeln!(out, "max |Im z|           {:.3e}", s.max_abs_im_z)?;
    writeln!(out, "energy drift         {:.3e}", s.energy_drift)?;
    if let Some(q) = quad {
        let rule = match q.sign {
            QuadrantSign::Indeterminate => "indeterminate",
            QuadrantSign::Positive => fmt_bool(q.im_b3 < 0.0),
            QuadrantSign::Negative => fmt_bool(q.im_b3 > 0.0),
        };
        writeln!(out, "Im b3                {:.6}", q.im_b3)?;
        writeln!(out, "transverse q1        {:.6e} at t = {:.6}", q.transverse, q.t_probe)?;
        writeln!(out, "sign rule            {rule}")?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_export(
    orbit: &Path,
    format: ExportFormat,
    samples: usize,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let x = OrbitFile::read(orbit)?.path()?;
    let s = export_string(&x, samples, format)?;
    match output {
        Some(p) => fs::write(p, s)?,
        None => out.write_all(s.as_bytes())?,
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Bounds { json, resolution } => cmd_bounds(*json, *resolution, out),
        Command::Minimize(args) => cmd_minimize(args, out),
        Command::Verify { orbit, tol, json } => cmd_verify(orbit, *tol, *json, out),
        Command::Scaling { d, branch, s_max, json } => cmd_scaling(*d, *branch, *s_max, *json, out),
        Command::LeviCivita { q2, p2, tau, json } => cmd_levi_civita(*q2, *p2, *tau, *json, out),
        Command::Export {
            orbit,
            format,
            samples,
            output,
        } => cmd_export(orbit, *format, *samples, output.as_deref(), out),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::rotating_square;

    fn sample_file() -> OrbitFile {
        let path = rotating_square(3).unwrap();
        OrbitFile::from_result(&OrbitResult {
            path,
            action: ActionValue::new(1.0 / 3.0, 0.1, 0.0),
            eps_history: vec![EpsRecord { eps: 0.1, value: 1.5 }, EpsRecord { eps: 0.0, value: 1.25 }],
            min_separation: 0.7,
            grad_norm: 1e-9,
            omega_signs: [1.0, 2.0, 3.0, -0.1],
            converged: true,
            quadrature: 64,
            seed: Some(4),
        })
    }

    #[test]
    fn orbit_json_key_order_and_roundtrip() {
        let f = sample_file();
        let s = f.to_json().unwrap();
        let keys = [
            "\"format_version\"",
            "\"period\"",
            "\"truncation\"",
            "\"quadrature\"",
            "\"coefficients\"",
            "\"action\"",
            "\"eps_history\"",
            "\"diagnostics\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.contains("\"period\": 6.283185307179586"));
        let back = OrbitFile::from_json(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_json().unwrap(), s);
        let r = back.to_result().unwrap();
        assert_eq!(OrbitFile::from_result(&r).to_json().unwrap(), s);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let mut f = sample_file();
        f.format_version = 2;
        assert!(OrbitFile::from_json(&f.to_json().unwrap()).is_err());
        let mut f = sample_file();
        f.coefficients.xi.pop();
        assert!(OrbitFile::from_json(&f.to_json().unwrap()).is_err());
        assert!(matches!(OrbitFile::from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn export_shape() {
        let x = rotating_square(3).unwrap();
        let csv = export_string(&x, 16, ExportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[0], "t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y");
        let row: Vec<f64> = lines[3].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row.len(), 9);
        assert_eq!(row[5], -row[1]);
        assert_eq!(row[8], -row[4]);
        let js: serde_json::Value = serde_json::from_str(&export_string(&x, 16, ExportFormat::Json).unwrap()).unwrap();
        assert_eq!(js["rows"].as_array().unwrap().len(), 16);
        assert!(export_string(&x, 0, ExportFormat::Csv).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_INPUT);
        assert_eq!(exit_code(&Error::CloseApproach { time: 0.0, distance: 0.0 }), EXIT_COLLISION);
        let nested = Error::Rung {
            rung: 1,
            eps: 0.1,
            source: Box::new(Error::SecondaryCollision { tau: 0.0 }),
        };
        assert_eq!(exit_code(&nested), EXIT_COLLISION);
    }

    #[test]
    fn complex_and_branch_parsing() {
        assert_eq!(parse_complex("1,-2").unwrap(), Complex64::new(1.0, -2.0));
        assert!(parse_complex("1").is_err());
        assert_eq!(parse_branch("-").unwrap(), Branch::Minus);
        assert!(parse_branch("x").is_err());
    }

    #[test]
    fn minimize_args_validation() {
        let cli = Cli::try_parse_from(["supereight", "minimize", "--k", "8", "--m", "16"]).unwrap();
        let Command::Minimize(a) = cli.command else { panic!() };
        assert!(a.run_config().is_err());
        let cli = Cli::try_parse_from(["supereight", "minimize", "--seeds", "3", "--first-seed", "5"]).unwrap();
        let Command::Minimize(a) = cli.command else { panic!() };
        let cfg = a.run_config().unwrap();
        assert_eq!(cfg.seeds, vec![5, 6, 7]);
        assert_eq!(cfg.schedule, Schedule::default());
    }
}
