//! Spectral toolkit for high-frequency perturbations of cnoidal waves in
//! periodic KdV: Fourier-side calculus, cnoidal-wave construction, the KdV and
//! linear flows, normal-form operators and the experiment harness.

pub mod cnoidal;
pub mod elliptic;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod kdv;
pub mod normal_form;

pub use cnoidal::CnoidalWave;
pub use error::{Error, Result};
pub use fourier::{FourierField, Grid, SobolevIndex, SobolevVariant};
pub use kdv::{SolverConfig, Trajectory};
