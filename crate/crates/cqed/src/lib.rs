//! Command-line front end: single evaluations, grid sweeps with CSV/JSON
//! output, and the built-in verification suite.

pub mod config;
pub mod error;
pub mod eval;
pub mod presets;
pub mod sweep;
pub mod verify;

pub use error::{CliError, Result};
