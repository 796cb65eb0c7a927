//! `teleport`: controlled-teleportation analysis of three-qubit channels.

mod input;
mod pretty;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use teleport_core::channel::DEFAULT_TOL;
use teleport_core::qcore::fidelity;
use teleport_core::{
    classify, le_report, optimize, pqr, reconstruct, run_exact, run_sampled, split, Complex, Error, MeasurementBasis,
    MessageQubit, OptimizerConfig,
};

#[derive(Parser)]
#[command(name = "teleport", version, about = "Controlled teleportation through three-qubit pure channels")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Read angle flags in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    /// Tolerance on canonical coefficients for classification.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Search or scan grid as NTHETAxNPHI.
    #[arg(long, global = true, value_parser = parse_grid, default_value = "257x512")]
    grid: (usize, usize),
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Angles {
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical coefficients and the local frame.
    Canonicalize { input: PathBuf },
    /// Branch quantities for one controller basis.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        angles: Angles,
    },
    /// Maximal success probability over controller bases.
    Optimize { input: PathBuf },
    /// Localizable entanglement between particles 2 and 3.
    Le { input: PathBuf },
    /// EPR-collapsibility and perfect-teleportation flags.
    Classify { input: PathBuf },
    /// CSV of P, Q, R and p over the angle grid.
    Scan {
        input: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the protocol exactly, or sample it with --shots.
    Simulate {
        input: PathBuf,
        #[command(flatten)]
        angles: Angles,
        /// Message amplitude of |0>, as `re` or `re,im`.
        #[arg(long, default_value = "1", value_parser = parse_complex, allow_negative_numbers = true)]
        alpha: Complex,
        /// Message amplitude of |1>, as `re` or `re,im`.
        #[arg(long, default_value = "0", value_parser = parse_complex, allow_negative_numbers = true)]
        beta: Complex,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected NTHETAxNPHI")?;
    let nt: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let np: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if nt < 2 || np < 1 {
        return Err("grid needs at least 2 theta and 1 phi points".into());
    }
    Ok((nt, np))
}

fn parse_complex(s: &str) -> std::result::Result<Complex, String> {
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e}")));
    let re = parts.next().ok_or("empty value")??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err("expected re or re,im".into());
    }
    Ok(Complex::new(re, im))
}

impl Cli {
    fn basis(&self, a: &Angles) -> Result<MeasurementBasis> {
        let k = if self.degrees { std::f64::consts::PI / 180.0 } else { 1.0 };
        Ok(MeasurementBasis::new(a.theta * k, a.phi * k)?)
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig { grid_theta: self.grid.0, grid_phi: self.grid.1, ..OptimizerConfig::default() }
    }
}

enum Output {
    Report(Value),
    Text(String),
}

fn scan_csv(c: &teleport_core::CanonicalCoefficients, nt: usize, np: usize) -> Result<String> {
    let rows: Vec<String> = (0..nt * np)
        .into_par_iter()
        .map(|k| {
            let theta = std::f64::consts::PI * (k / np) as f64 / (nt - 1) as f64;
            let phi = std::f64::consts::TAU * (k % np) as f64 / np as f64;
            let (p, q, r) = pqr(c, &MeasurementBasis::wrapped(theta, phi))?;
            Ok(format!("{theta:.16e},{phi:.16e},{p:.16e},{q:.16e},{r:.16e},{:.16e}", 1.0 - r))
        })
        .collect::<teleport_core::Result<_>>()?;
    let mut out = String::with_capacity(rows.len() * 140);
    out.push_str("theta,phi,P,Q,R,p\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<Output> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        bail!("--tol must be positive");
    }
    Ok(match &cli.command {
        Command::Canonicalize { input } => {
            let s = input::read(input)?;
            let state = s.state()?;
            let form = s.canonical_form()?;
            let f = fidelity(&reconstruct(&form), &state)?;
            Output::Report(report::canonical(&form, f, s.controller))
        }
        Command::Analyze { input, angles } => {
            let c = input::read(input)?.coefficients()?;
            let b = cli.basis(angles)?;
            Output::Report(report::split(&b, &split(&c, &b)?))
        }
        Command::Optimize { input } => {
            let c = input::read(input)?.coefficients()?;
            Output::Report(report::optimization(&c, &optimize(&c, &cli.optimizer())?))
        }
        Command::Le { input } => {
            let c = input::read(input)?.coefficients()?;
            Output::Report(report::le(&c, &le_report(&c, cli.grid.0, cli.grid.1)?))
        }
        Command::Classify { input } => {
            let c = input::read(input)?.coefficients()?;
            Output::Report(report::classification(&c, &classify(&c, cli.tol), cli.tol))
        }
        Command::Scan { input, out } => {
            let c = input::read(input)?.coefficients()?;
            let csv = scan_csv(&c, cli.grid.0, cli.grid.1)?;
            match out {
                Some(path) => {
                    std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
                    Output::Text(String::new())
                }
                None => Output::Text(csv),
            }
        }
        Command::Simulate { input, angles, alpha, beta, shots, seed } => {
            let c = input::read(input)?.coefficients()?;
            let b = cli.basis(angles)?;
            let m = MessageQubit::normalized(*alpha, *beta)?;
            match shots {
                None => Output::Report(report::protocol(&run_exact(&c, &b, &m)?)),
                Some(n) => {
                    let exact = run_exact(&c, &b, &m)?.p_success;
                    Output::Report(report::sample(&b, exact, &run_sampled(&c, &b, &m, *n, *seed)?))
                }
            }
        }
    })
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("TELEPORT_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| anyhow!("TELEPORT_THREADS must be a nonnegative integer, got {v:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BiseparableChannel(_)) => 3,
        Some(Error::InternalInconsistency(_)) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(&cli));
    match result {
        Ok(out) => {
            let text = match out {
                Output::Report(v) if cli.pretty => pretty::to_text(&v),
                Output::Report(v) => format!("{}\n", serde_json::to_string(&v).expect("serializable report")),
                Output::Text(t) => t,
            };
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
