//! File formats, the experiment harness and the command-line frontend for
//! [`irl_core`].

pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;

pub use error::{IrlError, Result};
