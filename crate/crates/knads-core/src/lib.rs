//! Spectral toolkit for the separated Dirac equation on Kerr-Newman-AdS backgrounds.

pub mod angular_solver;
pub mod classify;
pub mod error;
pub mod geometry;
pub mod modescan;
pub mod numerics;
pub mod operators;
pub mod oracle;
pub mod radial_solver;

pub use error::{Error, Result};
