//! Model files, command dispatch and reports for the `groupoidal` binary.

pub mod commands;
pub mod error;
pub mod model;
pub mod resolve;

pub use commands::{run_command, CliReport, Opts, Status};
pub use error::{CliError, Result};
pub use model::{parse_syntax, serialize, Decl, ModelFile};
pub use resolve::{parse_model, Model, Value};

/// The model used when no `--model` file is given.
pub const FIXTURES: &str = include_str!("fixtures.gpd");
