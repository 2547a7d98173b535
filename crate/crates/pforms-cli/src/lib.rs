//! Parser, session handling and report generation behind the `pforms` binary.

pub mod commands;
pub mod error;
pub mod parse;
pub mod session;

pub use commands::{Outcome, SCHEMA_VERSION};
pub use error::{CliError, Result};
pub use session::Session;
