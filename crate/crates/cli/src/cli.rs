//! Argument parsing and command execution with the exit-code contract.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use haantjes::{Tolerances, EPS_DERIV, EPS_EXACT};
use haantjes_lagrange::{EulerPoissonFields, TopError, TopParams, CSV_HEADER};

use crate::suites::{self, Context, Suite};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_BLOW_UP: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "haantjes", version, about = "Sampled verification of Haantjes and Poisson geometry of the Lagrange top")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Integrate the Lagrange flow with RK4 and write a CSV trajectory.
    Integrate(IntegrateArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample points per check.
    #[arg(long, default_value_t = 100)]
    pub points: u32,
    #[arg(long = "tol-exact", default_value_t = EPS_EXACT)]
    pub tol_exact: f64,
    #[arg(long = "tol-deriv", default_value_t = EPS_DERIV)]
    pub tol_deriv: f64,
    /// Report path; the report goes to standard output without it.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Initial `ω1,ω2,ω3,γ1,γ2,γ3`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub init: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tmax: f64,
    /// Trajectory path; only drifts are printed without it.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn params(c: f64) -> Result<TopParams, String> {
    TopParams::with_c(c).map_err(|e| e.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()
}

fn verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    if args.points == 0 {
        let _ = writeln!(err, "error: --points must be at least 1");
        return EXIT_USAGE;
    }
    for (name, t) in [("--tol-exact", args.tol_exact), ("--tol-deriv", args.tol_deriv)] {
        if !(t.is_finite() && t > 0.0) {
            let _ = writeln!(err, "error: {name} must be positive, got {t}");
            return EXIT_USAGE;
        }
    }
    let params = match params(args.c) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let tol = Tolerances { exact: args.tol_exact, deriv: args.tol_deriv };
    let ctx = Context::new(args.seed, args.points as usize, tol, params);
    let report = suites::run(args.suite, &ctx);
    let json = report.to_json();
    match &args.json {
        Some(path) => {
            if let Err(e) = write_file(path, json.as_bytes()) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_IO;
            }
            let _ = out.write_all(report.summary().as_bytes());
        }
        None => {
            let _ = err.write_all(report.summary().as_bytes());
            if out.write_all(json.as_bytes()).is_err() {
                return EXIT_IO;
            }
        }
    }
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn integrate(args: &IntegrateArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let usage = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "error: {msg}");
        EXIT_USAGE
    };
    let params = match params(args.c) {
        Ok(p) => p,
        Err(e) => return usage(err, e),
    };
    let init: [f64; 6] = match args.init.as_slice().try_into() {
        Ok(v) => v,
        Err(_) => return usage(err, format!("--init takes 6 values, got {}", args.init.len())),
    };
    let fields = match EulerPoissonFields::new(&params) {
        Ok(f) => f,
        Err(e) => return usage(err, e.to_string()),
    };
    let tr = match fields.integrate(&init, args.dt, args.tmax) {
        Ok(tr) => tr,
        Err(TopError::BlowUp { last_valid }) => {
            let _ = writeln!(err, "error: non-finite state; last valid time {last_valid}");
            return EXIT_BLOW_UP;
        }
        Err(TopError::SingularState { t }) => {
            let _ = writeln!(err, "error: singular state at t = {t}; last valid time {}", (t - args.dt).max(0.0));
            return EXIT_BLOW_UP;
        }
        Err(e) => return usage(err, e.to_string()),
    };
    if let Some(path) = &args.csv {
        let mut buf = Vec::new();
        let written = tr.write_csv(&mut buf, &CSV_HEADER).and_then(|_| write_file(path, &buf));
        if let Err(e) = written {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_IO;
        }
    }
    let drift = tr.max_drift();
    let _ = writeln!(out, "steps {}  t_end {}", tr.len() - 1, tr.times.last().copied().unwrap_or(0.0));
    for (name, d) in CSV_HEADER[7..].iter().zip(&drift) {
        let _ = writeln!(out, "drift {name:<3} {d:.6e}");
    }
    let _ = writeln!(out, "max drift {:.6e}", drift.iter().copied().fold(0.0, f64::max));
    EXIT_PASS
}

/// Runs the parsed command, writing to `out` and `err`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match &cli.command {
        Command::Verify(a) => verify(a, out, err),
        Command::Integrate(a) => integrate(a, out, err),
    }
}
