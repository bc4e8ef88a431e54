//! Command-line front end and JSON service for the natprog toolchain.

pub mod api;
pub mod cli;
