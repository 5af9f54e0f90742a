use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tendon_statics::cli::{
    self, load_config, run_curve, run_solve, run_sweep, run_validate, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "tendon-statics",
    about = "Quasi-static equilibrium of a tendon-driven ball-socket robot unit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one equilibrium for the given tensions.
    Solve {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Tension on the long (loose) side, N.
        #[arg(long)]
        tl: f64,
        /// Tension on the short (taut) side, N.
        #[arg(long)]
        ts: f64,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
    /// Solve a cartesian grid of tensions (range specs: start:stop:step).
    Sweep {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// t_l range spec, e.g. 0.5:3:0.5.
        #[arg(long)]
        tl: String,
        /// t_s range spec.
        #[arg(long)]
        ts: String,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
    /// Tabulate the equilibrium function over [0, 30] degrees.
    Curve {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long)]
        tl: f64,
        #[arg(long)]
        ts: f64,
        /// Grid step in degrees.
        #[arg(long)]
        step: f64,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
    /// Solve, verify signs/residuals and cross-check against the grid oracle.
    Validate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long)]
        tl: f64,
        #[arg(long)]
        ts: f64,
    },
}

fn run() -> Result<(), cli::CliError> {
    let args = Cli::parse();
    match args.command {
        Command::Solve {
            config,
            tl,
            ts,
            format,
            out,
        } => {
            let cfg = load_config(&config)?;
            run_solve(&cfg, tl, ts, format, out.as_deref())
        }
        Command::Sweep {
            config,
            tl,
            ts,
            format,
            out,
        } => {
            let cfg = load_config(&config)?;
            run_sweep(&cfg, &tl, &ts, format, out.as_deref())
        }
        Command::Curve {
            config,
            tl,
            ts,
            step,
            format,
            out,
        } => {
            let cfg = load_config(&config)?;
            run_curve(&cfg, tl, ts, step, format, out.as_deref())
        }
        Command::Validate { config, tl, ts } => {
            let cfg = load_config(&config)?;
            run_validate(&cfg, tl, ts)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::from(cli::EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
