//! Job configuration, execution and table output for the `fraclap` binary.

pub mod config;
pub mod jobs;
pub mod output;
