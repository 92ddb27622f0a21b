//! Benchmark cases, configuration files, output writers and studies.

pub mod cases;
pub mod config;
pub mod output;
pub mod run;
pub mod study;
