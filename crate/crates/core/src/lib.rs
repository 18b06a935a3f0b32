//! Complementary oblique projections on metric spaces: induced metrics,
//! pseudodeterminant duality, isospectral partner forms, and their graph and
//! resistor-network instances.

pub mod circuits;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod graphcycles;
pub mod numkit;
pub mod oblique;
pub mod random;
pub mod susy;

pub use error::{Error, Result};
