//! File formats, configuration, parallel sweeps and the command-line front
//! end around [`cyclesmooth_core`].

pub mod bundled;
pub mod cli;
pub mod config;
pub mod cycle_file;
mod error;
pub mod export;
pub mod parallel;

pub use cyclesmooth_core as core;
pub use error::{Error, Result};
