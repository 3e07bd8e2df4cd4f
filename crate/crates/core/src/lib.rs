//! Spectral simulator for one-dimensional scalar field theory: position
//! densities under the Newton-Wigner and field-operator yardsticks, free
//! evolution, boosts and short-time two-particle interaction corrections.

pub mod boost;
pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod grid;
pub mod interaction;
pub mod peaks;
pub mod states;

pub use error::{Error, Result};
