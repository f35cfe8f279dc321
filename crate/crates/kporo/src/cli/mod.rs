//! Command-line front end: set generation, porosity/dimension runs, the
//! sharpness experiment, covering demos, and the verification suites.
//!
//! All flags are long-form. A config file of `key=value` lines (keys are
//! flag names without the leading dashes) can be loaded with `--config`;
//! explicit command-line flags override it. Exit codes: 0 success,
//! 1 verification failure, 2 usage or input error.

mod commands;
mod config;
mod output;
pub mod sharpness;
mod svg;
pub mod verify;

pub use output::{fmt_f64, to_json};

use crate::error::Error;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "kporo",
    version,
    about = "k-porosity and box-counting dimension toolkit for sets in the unit cube",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// config file with key=value lines; command-line flags override it
    #[arg(long, global = false)]
    pub config: Option<PathBuf>,
    /// output path ("-" for stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed for every randomized choice in the run
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// data-parallel thread cap (default: available parallelism);
    /// results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// print progress notes to stderr
    #[arg(long, default_value_t = false)]
    pub verbose: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a set and write it as a .kpgrid file
    Generate(commands::GenerateArgs),
    /// Estimate k-porosity of a grid set (CSV output)
    Porosity(commands::PorosityArgs),
    /// Box-count a grid set and fit the upper Minkowski dimension (JSON)
    Dimension(commands::DimensionArgs),
    /// Run the Cantor-product sharpness experiment (JSON)
    Sharpness(sharpness::SharpnessArgs),
    /// Decompose a convex body's boundary into planar pieces (JSON)
    Decompose(commands::DecomposeArgs),
    /// Run the covering construction at one point and scale (JSON)
    Cover(commands::CoverArgs),
    /// Run the property suites; exit 0 iff all pass (JSON summary)
    Verify(verify::VerifyArgs),
}

/// Parses argv (after config-file expansion) and runs the command.
/// Returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> u8 {
    let argv: Vec<String> = argv.into_iter().collect();
    let argv = match config::expand_config_args(argv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(Error::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> crate::error::Result<()> {
    match cli.command {
        Command::Generate(args) => commands::run_generate(args),
        Command::Porosity(args) => commands::run_porosity(args),
        Command::Dimension(args) => commands::run_dimension(args),
        Command::Sharpness(args) => sharpness::run_sharpness_cmd(args),
        Command::Decompose(args) => commands::run_decompose(args),
        Command::Cover(args) => commands::run_cover(args),
        Command::Verify(args) => verify::run_verify(args),
    }
}

/// Runs `f` inside a rayon pool capped at `threads` (when given).
pub(crate) fn with_thread_cap<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> crate::error::Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
