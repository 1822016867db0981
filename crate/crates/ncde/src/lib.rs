//! File formats and the command line for `ncde-core`.

pub mod cli;
pub mod json;
pub mod matpath;
pub mod props;

pub use cli::{run, run_with};
