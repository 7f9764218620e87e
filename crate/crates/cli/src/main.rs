//! `shearmap` command-line tool. Prints a JSON report on stdout and exits
//! with 0 when every check passed, 2 when a check failed and 1 on usage or
//! input errors.

mod commands;
mod grammar;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shearmap::{GridSpec, DEFAULT_ORDER};

use commands::{AppResult, CombineArgs, ConvolveArgs, ShearArgs};

#[derive(Debug, Parser)]
#[command(name = "shearmap", version, about = "Harmonic mappings by shear construction")]
struct Cli {
    /// Truncation order of the printed series and coefficient identities.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Disk grid as RADII,ANGLES.
    #[arg(long, global = true, value_parser = grammar::grid_size)]
    grid: Option<(usize, usize)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a worked example, run its harness and optionally render figures.
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        number: u8,
        /// Directory for figure SVG/CSV files and the JSON report.
        #[arg(long)]
        render: Option<PathBuf>,
    },
    /// Shear construction of a single map.
    Shear {
        #[arg(long)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, allow_hyphen_values = true, value_parser = grammar::lambda)]
        lambda: num_complex::Complex64,
    },
    /// Convex combination of two shears.
    Combine {
        #[arg(long)]
        phi1: String,
        #[arg(long, allow_hyphen_values = true)]
        omega1: String,
        #[arg(long, allow_hyphen_values = true, value_parser = grammar::lambda)]
        lambda1: num_complex::Complex64,
        #[arg(long)]
        phi2: String,
        #[arg(long, allow_hyphen_values = true)]
        omega2: String,
        #[arg(long, allow_hyphen_values = true, value_parser = grammar::lambda)]
        lambda2: num_complex::Complex64,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = grammar::direction)]
        direction: Option<f64>,
        /// Kernel angles T1,T2 for the mixed-sign case.
        #[arg(long, allow_hyphen_values = true, value_parser = grammar::angle_pair)]
        kernel: Option<(f64, f64)>,
    },
    /// Convolution of the half-plane shear with a shear of `--base`.
    Convolve {
        /// `halflog` or `kernel:T1,T2`.
        #[arg(long)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        omega1: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda1: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega2: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda2: f64,
    },
    /// Search for a certificate that `--phi` is convex in a direction.
    Check {
        #[arg(long)]
        phi: String,
        /// `real`, `imag` or an angle such as `pi/4`.
        #[arg(long, allow_hyphen_values = true, value_parser = grammar::direction)]
        direction: f64,
    },
}

fn run(cli: Cli) -> AppResult<report::Report> {
    let mut grid = GridSpec::default();
    if let Some((radii, angles)) = cli.grid {
        grid = grid.with_disk(radii, angles)?;
    }
    let order = cli.order;
    if order < 2 {
        return Err("--order must be at least 2".into());
    }
    match &cli.command {
        Command::Example { number, render } => commands::example(*number, order, &grid, render.as_deref()),
        Command::Shear { phi, omega, lambda } => commands::shear_command(
            &ShearArgs {
                phi,
                omega,
                lambda: *lambda,
            },
            order,
            &grid,
        ),
        Command::Combine {
            phi1,
            omega1,
            lambda1,
            phi2,
            omega2,
            lambda2,
            t,
            direction,
            kernel,
        } => commands::combine_command(
            &CombineArgs {
                phi1,
                omega1,
                lambda1: *lambda1,
                phi2,
                omega2,
                lambda2: *lambda2,
                t: *t,
                direction: *direction,
                kernel: *kernel,
            },
            order,
            &grid,
        ),
        Command::Convolve {
            base,
            omega1,
            lambda1,
            omega2,
            lambda2,
        } => commands::convolve_command(
            &ConvolveArgs {
                base,
                omega1,
                lambda1: *lambda1,
                omega2,
                lambda2: *lambda2,
            },
            order,
            &grid,
        ),
        Command::Check { phi, direction } => commands::check_command(phi, *direction, order, &grid),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
