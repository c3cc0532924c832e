//! Symbol-description parsing, pipelines and report emission for the
//! `esspos` binary.

pub mod config;
pub mod model;
pub mod parse;
pub mod report;
pub mod run;

pub use parse::{parse_symbol, render, SymbolSpec};
pub use run::{run, Command, Exit, Format, Options, Outcome, RunError};
