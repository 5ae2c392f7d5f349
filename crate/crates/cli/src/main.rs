use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod matrix_io;
mod metric_spec;

use commands::{CliResult, Output, TransportMode};

/// Geometry of symmetric positive definite matrices.
///
/// Matrix files hold whitespace-separated rows, one matrix per block, blocks
/// separated by blank lines. Commands taking several files pair their blocks
/// in order; a file holding a single block is paired with every block of the
/// others.
#[derive(Parser, Debug)]
#[command(name = "spdgeo", version)]
struct Cli {
    /// Decimal digits in printed results.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geodesic distance between paired matrices.
    Dist {
        #[arg(long)]
        metric: String,
        a: PathBuf,
        b: PathBuf,
    },
    /// Riemannian exponential exp_Σ(tX). Metrics without a closed form are
    /// integrated.
    Exp {
        #[arg(long)]
        metric: String,
        sigma: PathBuf,
        x: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        /// Integrator steps when no closed form exists.
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Riemannian logarithm log_Σ(Λ).
    Log {
        #[arg(long)]
        metric: String,
        sigma: PathBuf,
        lambda: PathBuf,
    },
    /// Parallel transport of X from Σ to Λ along the geodesic.
    Transport {
        #[arg(long)]
        metric: String,
        sigma: PathBuf,
        lambda: PathBuf,
        x: PathBuf,
        #[arg(long, value_enum, default_value_t = TransportMode::Closed)]
        mode: TransportMode,
        /// Integrator steps for --mode ode.
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Sectional curvature of the plane spanned by X and Y at Σ.
    Curvature {
        #[arg(long)]
        metric: String,
        sigma: PathBuf,
        x: PathBuf,
        y: PathBuf,
    },
    /// Checks symmetry, compatibility and positivity of a metric on a sampling
    /// grid. Exits 1 when a condition fails. SPDGEO_SEED fixes the random
    /// sample.
    Validate {
        #[arg(long)]
        metric: String,
        /// Matrix dimension.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Number of random spectra in addition to the tensor grid.
        #[arg(long)]
        points: Option<usize>,
    },
    /// ‖Gram(g)·Gram(g*) − I‖ at each Σ.
    CometricCheck {
        #[arg(long)]
        metric: String,
        sigma: PathBuf,
    },
    /// Hamiltonian integration against the closed-form exponential.
    Bench {
        #[arg(long)]
        metric: String,
        sigma: PathBuf,
        x: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        /// Comma-separated step counts.
        #[arg(long, value_delimiter = ',', default_values_t = [25, 50, 100, 200])]
        steps: Vec<usize>,
    },
}

fn run(cli: &Cli) -> CliResult<Output> {
    let p = cli.precision as usize;
    match &cli.command {
        Command::Dist { metric, a, b } => commands::cmd_dist(&commands::parse_metric(metric)?, a, b, p),
        Command::Exp {
            metric,
            sigma,
            x,
            t,
            steps,
        } => commands::cmd_exp(&commands::parse_metric(metric)?, sigma, x, *t, *steps, p),
        Command::Log { metric, sigma, lambda } => {
            commands::cmd_log(&commands::parse_metric(metric)?, sigma, lambda, p)
        }
        Command::Transport {
            metric,
            sigma,
            lambda,
            x,
            mode,
            steps,
        } => commands::cmd_transport(&commands::parse_metric(metric)?, [sigma, lambda, x], *mode, *steps, p),
        Command::Curvature { metric, sigma, x, y } => {
            commands::cmd_curvature(&commands::parse_metric(metric)?, [sigma, x, y], p)
        }
        Command::Validate { metric, dim, points } => {
            commands::cmd_validate(&commands::parse_metric(metric)?, *dim, *points)
        }
        Command::CometricCheck { metric, sigma } => {
            commands::cmd_cometric_check(&commands::parse_metric(metric)?, sigma, p)
        }
        Command::Bench {
            metric,
            sigma,
            x,
            t,
            steps,
        } => commands::cmd_bench(&commands::parse_metric(metric)?, sigma, x, *t, steps, p),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a diagnostic
            let _ = stdout.write_all(out.text.as_bytes());
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("spdgeo: {}", e.message.replace('\n', " "));
            ExitCode::from(e.code as u8)
        }
    }
}
