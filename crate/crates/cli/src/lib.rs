//! Library side of the `madtest` command-line tool: data ingestion, quantile
//! table persistence, report formatting, and the subcommand implementations.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;
pub mod tables;

pub use error::{CliError, Result};
pub use io::{ColumnSelector, read_sample};
pub use tables::{TABLE_SCHEMA_VERSION, load_table, save_table};
