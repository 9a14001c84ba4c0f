//! Command-line front end. Each subcommand reads record files from a run
//! directory and writes new ones; see [`Command`] for the inputs and outputs
//! of each stage.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use helpcom_core::Error as CoreError;
use helpcom_core::prompt::Strategy;
use helpcom_core::provider::ProviderError;

pub use commands::execute;

/// Exit status for a usage or configuration error.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for bad or missing data.
pub const EXIT_DATA: i32 = 2;
/// Exit status for a completion, embedding or alignment provider failure.
pub const EXIT_PROVIDER: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "helpcom",
    version,
    about = "Helper-aware code comment generation and evaluation"
)]
pub struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true, default_value = "helpcom.toml")]
    pub config: PathBuf,

    /// Run directory name under the configured runs_dir.
    #[arg(long = "run-id", global = true, default_value = "default")]
    pub run_id: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse repositories into method and invocation records.
    Extract {
        #[arg(long)]
        repo: Option<String>,
    },
    /// Resolve invocations, classify methods and compute helper chains.
    Graph,
    /// Count commits and authors per method with `git log -L`.
    History {
        #[arg(long)]
        repo: Option<String>,
    },
    /// Keep commented methods whose comment aligns with the code.
    Filter {
        /// Minimum alignment score; defaults to eval.side_threshold.
        #[arg(long, allow_negative_numbers = true)]
        threshold: Option<f64>,
    },
    /// Draw an equal-size seeded sample of dependent and independent methods.
    Sample {
        /// Defaults to Cochran's size (95%, 5%) for the smaller class.
        #[arg(long = "n-per-class")]
        n_per_class: Option<usize>,
        /// Defaults to sampling.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Draw from a saved selection instead of all methods.
        #[arg(long)]
        selection: Option<String>,
    },
    /// Generate comments with one prompt strategy.
    Generate {
        #[arg(long)]
        strategy: Strategy,
        /// Canned completion responses instead of the configured endpoint.
        #[arg(long = "mock-provider")]
        mock_provider: Option<PathBuf>,
        /// Generate for a saved selection instead of all methods.
        #[arg(long)]
        selection: Option<String>,
    },
    /// Score generated comments against the developer-written comments.
    Score {
        /// Canned judge responses instead of the configured judge endpoints.
        #[arg(long = "mock-provider")]
        mock_provider: Option<PathBuf>,
    },
    /// Per-strategy metric table with significance marks.
    Report {
        #[arg(long = "reference-strategy", default_value = "helpcomN")]
        reference_strategy: String,
    },
    /// Add externally produced comments as a named strategy.
    ImportComments {
        /// Label stored as the strategy of every imported comment.
        #[arg(long)]
        strategy: String,
        /// JSON lines file of `{"method_id": ..., "text": ...}` rows.
        path: PathBuf,
    },
}

/// Maps an error to the documented exit status.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::Provider(_) => EXIT_PROVIDER,
                CoreError::Config(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            };
        }
        if cause.downcast_ref::<ProviderError>().is_some() {
            return EXIT_PROVIDER;
        }
    }
    EXIT_DATA
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
