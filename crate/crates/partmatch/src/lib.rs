//! Parallel execution, file formats and the `partmatch` command-line tool
//! on top of [`partmatch_core`].

pub mod cli;
pub mod error;
pub mod exec;
pub mod io;
pub mod report;

pub use error::{exit, CliError};
pub use exec::{with_threads, Rayon};
