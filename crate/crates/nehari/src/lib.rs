//! Std companion of `nehari-core`: FFT synthesis, the ratio experiment,
//! file formats and the command-line front end.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod synthesis;

pub use error::{NehariError, Result};
pub use nehari_core;
