//! `isotriplet`: verification suites, radial spectra, matrix elements and gauge tables.

mod commands;
mod config;
mod error;
mod observable;
mod output;
mod states;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use config::{parse_complex, parse_half, parse_positive_twice, parse_sign, parse_twice, Format, RunConfig};
use error::{CliError, CliResult};
use verify::Suite;

#[derive(Parser)]
#[command(name = "isotriplet", version, about = "Isospin-triplet Dirac fields in monopole backgrounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// `trivial`, `bps`, `bps:MU`, or table paths `W[,F[,PHI]]`
    #[arg(long, default_value = "bps:1")]
    profile: String,
    /// Twice the total angular momentum, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_positive_twice)]
    twoj: Option<Vec<i32>>,
    /// Total angular momentum as `3/2`, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_half, conflicts_with = "twoj")]
    j: Option<Vec<i32>>,
    /// Twice the projection m
    #[arg(long, default_value = "1", value_parser = parse_twice, allow_hyphen_values = true)]
    twom: i32,
    /// Sector sign(s), comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_sign, allow_hyphen_values = true)]
    delta: Option<Vec<i32>>,
    /// Sector phase A (`a+bi`)
    #[arg(long = "A", default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    a: Complex64,
    /// T₀ phase-scale B (`a+bi`)
    #[arg(long = "B", default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    b: Complex64,
    /// α directly (`a+bi`); defaults to e^{iA}
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<Complex64>,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Clone)]
struct QuadArgs {
    #[arg(long, default_value_t = 96)]
    n_theta: usize,
    #[arg(long, default_value_t = 96)]
    n_phi: usize,
    #[arg(long, default_value_t = 400)]
    n_r: usize,
    #[arg(long, default_value_t = 20.0)]
    rmax: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites and print per-check residuals
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Assemble a radial system, scan for modes, write solutions
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Radial system, e.g. `reduced_W0`; chosen from j and the profile by default
        #[arg(long)]
        case: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eps_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        eps_max: Option<f64>,
        /// Energy used for the solution table when no mode is found
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value_t = 120)]
        scan_points: usize,
        #[arg(long, default_value_t = 400)]
        grid_points: usize,
    },
    /// Matrix elements of an observable between sector states
    Matelem {
        #[command(flatten)]
        common: Common,
        /// `density`, `identity`, or terms like `I:gamma0*cos_theta`
        #[arg(long, default_value = "density", allow_hyphen_values = true)]
        observable: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Potentials in the hedgehog, Dirac and Schwinger frames
    GaugeTable {
        #[command(flatten)]
        common: Common,
        /// Radii, comma separated
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        n_theta: usize,
        #[arg(long, default_value_t = 4)]
        n_phi: usize,
    },
}

fn base_config(name: &str, c: &Common, twoj: &[i32], delta: &[i32]) -> RunConfig {
    let mut cfg = RunConfig::new(name);
    cfg.profile = c.profile.clone();
    cfg.twoj = c.twoj.clone().or_else(|| c.j.clone()).unwrap_or_else(|| twoj.to_vec());
    cfg.twom = c.twom;
    cfg.delta = c.delta.clone().unwrap_or_else(|| delta.to_vec());
    cfg.a = c.a;
    cfg.b = c.b;
    cfg.alpha = c.alpha;
    cfg.mass = c.mass;
    cfg.tolerances.tol = c.tol;
    cfg.format = c.format;
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    cfg
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Verify { suite, common } => {
            let mut cfg = base_config("verify", &common, &[3], &[1]);
            cfg.suite = Some(suite.name().into());
            let checks = verify::run(suite, &cfg)?;
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.pass()).count();
            println!("{} of {} checks pass", checks.len() - failed, checks.len());
            if common.out.is_some() {
                output::write_table(&cfg, "verify", &verify::table(&checks))?;
            }
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Spectrum { common, case, eps_min, eps_max, epsilon, rmax, scan_points, grid_points } => {
            let mut cfg = base_config("spectrum", &common, &[1], &[1]);
            if cfg.twoj.len() != 1 || cfg.delta.len() != 1 {
                return Err(CliError::Usage("spectrum takes a single j and a single δ".into()));
            }
            cfg.case = case;
            cfg.epsilon = epsilon;
            cfg.grids.rmax = rmax;
            cfg.grids.scan_points = scan_points;
            cfg.grids.n_r = grid_points;
            let (lo, hi) = (eps_min.unwrap_or(-0.9 * cfg.mass), eps_max.unwrap_or(0.9 * cfg.mass));
            cfg.eps_range = Some((lo, hi));
            let s = commands::spectrum(&cfg)?;
            println!("{} mode(s)", s.modes);
            for f in &s.files {
                println!("wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Matelem { common, observable, quad } => {
            let mut cfg = base_config("matelem", &common, &[1, 3], &[1, -1]);
            cfg.observable = Some(observable);
            cfg.grids.n_theta = quad.n_theta;
            cfg.grids.n_phi = quad.n_phi;
            cfg.grids.n_r = quad.n_r;
            cfg.grids.rmax = quad.rmax;
            let s = commands::matelem(&cfg)?;
            let omega = s.omega.map(|o| format!("{:+}", o.value())).unwrap_or_else(|| "none".into());
            println!("Ω = {omega}; {} row(s), {} failing", s.rows, s.failed);
            println!("wrote {}", s.file.display());
            Ok(if s.failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::GaugeTable { common, r, n_theta, n_phi } => {
            let mut cfg = base_config("gauge-table", &common, &[1], &[1]);
            cfg.radii = r;
            cfg.grids.n_theta = n_theta;
            cfg.grids.n_phi = n_phi;
            let f = commands::gauge_table(&cfg)?;
            println!("wrote {}", f.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
