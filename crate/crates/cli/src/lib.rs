//! File formats, instance generation, SVG rendering, benchmarking and the
//! `ktc` command line.

pub mod bench;
pub mod commands;
pub mod error;
pub mod format;
pub mod gen;
pub mod render;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
