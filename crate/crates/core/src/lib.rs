//! Basin-of-attraction laboratory.
//!
//! Generates basins for five dynamical systems ([`systems`]), measures them
//! with Monte Carlo box-counting fractal dimension, basin entropy, boundary
//! basin entropy and the Wada merging test ([`metrics`]), and turns them into
//! a labeled image corpus ([`dataset`]).

pub mod cli;
pub mod dataset;
pub mod grid;
pub mod metrics;
pub mod systems;

pub use grid::{BasinGrid, GridError, Region, UNRESOLVED};
