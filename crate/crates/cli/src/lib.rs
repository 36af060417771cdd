//! Command-line front end: argument parsing, thread pool, CSV and manifest
//! output. Each subcommand writes `<experiment>.csv` and `manifest.json` into
//! the output directory.

pub mod config;
pub mod run;

pub use config::{parse_args, Experiment, RunConfig};
pub use run::{execute, format_real, run, RunError};
