//! Numerical study of a Rabi-coupled two-component Gross–Pitaevskii system in
//! a harmonic trap and of its fast-oscillation limit.

pub mod cli;
pub mod criteria;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod io;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
