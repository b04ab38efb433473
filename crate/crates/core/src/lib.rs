//! Pseudo-spectral toolkit for the 3D energy-critical inhomogeneous
//! generalized Hartree equation
//!
//! `i u_t + Laplacian u + sigma |x|^{-b} (I_alpha * |x|^{-b} |u|^p) |u|^{p-2} u = 0`,
//! `p = 3 + alpha - 2b`, on a periodic cube.

pub mod acceptance;
pub mod checkpoint;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod fft;
pub mod field;
pub mod grid;
pub mod littlewood_paley;
pub mod ground_state;
pub mod model;
pub mod spectral;

pub use error::{HartreeError, Result};
pub use field::{ScalarField, SpectrumField};
pub use grid::{make_grid, GridSpec};
pub use model::{validate_params, HartreeModel, ModelParams, Sign};
pub use num_complex::Complex64;
