//! Command-line front end for `pj-core`: every command builds one typed
//! table plus metadata, serialized as JSON or CSV.

pub mod commands;
pub mod error;
pub mod table;

pub use commands::{execute, run, Cli, Command, Format, Outcome};
pub use error::CliError;
pub use table::{Document, Table, Value};
