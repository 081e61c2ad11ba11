//! Std companion to `choco-core`: parallel table builds, CSV/JSON encodings,
//! an on-disk table cache and the `choco` command line.

pub mod cache;
pub mod cli;
pub mod io;
pub mod parallel;

pub use cli::{exit_code, run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
