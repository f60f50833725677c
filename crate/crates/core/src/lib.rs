//! Convex geometry, certified region computations, bump symbols and
//! discretized Hankel operators on Paley-Wiener spaces of convex domains.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, FFTs or the command line lives in the companion `nehari`
//! crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bound;
pub mod bump;
pub mod classify;
pub mod domain;
mod error;
pub mod hankel;
pub mod lp;
pub mod math;
pub mod polygon;
pub mod region;
pub mod verdict;

pub use error::{Error, Result};
