//! Command-line front end: CSV sweeps and summaries of the lateral
//! Casimir force between corrugated plasma-model plates.
//!
//! Parameters come from built-in defaults (gold plates, a 100 µm sphere at
//! 221 nm over a 1.2 µm corrugation), then an optional `--config` file of
//! `key = value` lines, then flags.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CmdError;
use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "casimir-lateral", version, about = "Lateral Casimir force between corrugated metal plates")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Plasma wavelength (nm)
    #[arg(long = "lambda-p", global = true)]
    lambda_p: Option<f64>,
    /// Separation, or closest approach for the sphere (nm)
    #[arg(long = "L", global = true)]
    separation: Option<f64>,
    /// Corrugation period (nm)
    #[arg(long = "lambda-c", global = true)]
    lambda_c: Option<f64>,
    /// Corrugation wavenumber (nm^-1)
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Corrugation amplitude on the plate (nm)
    #[arg(long, global = true)]
    a1: Option<f64>,
    /// Corrugation amplitude on the sphere (nm)
    #[arg(long, global = true)]
    a2: Option<f64>,
    /// Lateral offset (nm); by default sin(kb) = 1
    #[arg(long, global = true, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Sphere radius (nm)
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Relative tolerance of the outermost integrals
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,
    /// Output file; stdout if absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key = value` parameter file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of sweep points
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Logarithmic sweep spacing (`--log-spacing=false` for linear)
    #[arg(long = "log-spacing", global = true, num_args = 0..=1, default_missing_value = "true")]
    log_spacing: Option<bool>,
    #[arg(long = "k-min", global = true)]
    k_min: Option<f64>,
    #[arg(long = "k-max", global = true)]
    k_max: Option<f64>,
    #[arg(long = "l-min", global = true)]
    l_min: Option<f64>,
    #[arg(long = "l-max", global = true)]
    l_max: Option<f64>,
    /// Lower end of the power-law fit window (nm)
    #[arg(long = "fit-min", global = true)]
    fit_min: Option<f64>,
    #[arg(long = "fit-max", global = true)]
    fit_max: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Ratio G(k)/G(0) against k (columns k_nm_inv, rho, rho_error)
    Rho,
    /// Plane-sphere force, exact and PFA, against k
    ForceVsK,
    /// Normalized plane-sphere force and comparators against L
    #[command(name = "force-vs-L")]
    ForceVsL,
    /// Flat-plate energy and its derivatives
    PlanePlane,
    /// Exact and PFA plane-sphere force at one geometry
    PlaneSphere,
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CASIMIR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CASIMIR_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<(String, Option<PathBuf>), CmdError> {
    init_threads()?;
    let cfg = RunConfig::resolve(cli)?;
    let text = match cli.command {
        Command::Rho => commands::rho(&cfg)?,
        Command::ForceVsK => commands::force_vs_k(&cfg)?,
        Command::ForceVsL => commands::force_vs_l(&cfg)?,
        Command::PlanePlane => commands::plane_plane(&cfg)?,
        Command::PlaneSphere => commands::plane_sphere(&cfg)?,
    };
    Ok((text, cfg.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, out)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::NotConverged(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
