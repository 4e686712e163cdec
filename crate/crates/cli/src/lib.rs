//! Front end for the `gpm-pim` binary: configuration resolution, command
//! execution and report formatting. Exposed as a library so the commands
//! can be driven from tests.

pub mod cli;
pub mod config;
pub mod report;
pub mod run;
