//! Library side of the `qrious` command-line tool.

pub mod commands;
pub mod search;
