//! Command-line front end for `semitangent`.

pub mod app;
pub mod expr;

pub use app::{run, CliError};
