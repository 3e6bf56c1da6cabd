//! Command-line front end: spec-file parsing, scheduling and reports.

pub mod report;
pub mod runner;
pub mod spec_file;
