//! Discrete maps with power-law memory for fractional models of economic
//! growth, plus the numerics used to study them.

pub mod error;
pub mod special_fn;
pub mod econ_model;
pub mod maps;
pub mod analytic;
pub mod analysis;
pub mod verify;
pub mod config;
pub mod cli;

pub use error::{Error, Result};
