//! Equivariant filtering for biased inertial navigation.

pub mod check;
pub mod cli;
pub mod config;
pub mod eqf;
pub mod ins;
pub mod io;
pub mod lie;
pub mod metrics;
pub mod sim;
pub mod symmetry;
