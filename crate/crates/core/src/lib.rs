//! Four-square decompositions with a linear side condition on two of the
//! coordinates, together with the ternary-form machinery behind them.
//!
//! * [`decompose`] finds and verifies certificates `n = x²+y²+z²+w²` with
//!   `x + 3y` a square or a power of 4.
//! * [`verify`] sweeps whole ranges in parallel with checkpointing.
//! * [`forms`], [`local`] and [`classswitch`] cover representation by the
//!   ternary forms used in the constructions.

pub mod arith;
pub mod classswitch;
pub mod decompose;
pub mod error;
pub mod forms;
pub mod local;
pub mod selftest;
pub mod verify;

pub use error::{Error, Result};

/// Version of the certificate record and report layout.
pub const SCHEMA_VERSION: u32 = 1;
