//! Patch-based ADER-WENO finite-volume solver for the 3D compressible Euler
//! equations, with accounting of the data moved across patch boundaries.

pub mod corrector;
pub mod error;
pub mod euler;
pub mod harness;
pub mod mesh;
pub mod predictor;
pub mod reconstruction;
pub mod riemann;
pub mod transfer;
pub mod util;

pub use error::{HydroError, Result};
