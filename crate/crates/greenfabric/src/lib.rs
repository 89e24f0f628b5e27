//! Dataset formats, reports, charts and the command-line front end for the
//! `greenfabric-core` footprint model.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod svg;

pub use error::{Error, Result};
