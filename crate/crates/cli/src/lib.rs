//! Library side of the `mobius` command: config files, run options and
//! output writers.

pub mod config;
pub mod error;
pub mod run;

pub use config::{parse_config, to_config_text, ConfigFile, Convention, FileSettings};
pub use error::CliError;
pub use run::{execute, load_scenario, RunConfig, RunReport, Source};
