//! Concrete spectra and nonlinearities for `u' + Au = F(u)`.

pub mod averaging;
pub mod grid;
pub mod nonlinearity;
pub mod rde;
pub mod spectra;

pub use averaging::{spatial_average_multiplier, spatial_averaging_defect, KAPPA_DEFAULT};
pub use grid::{Lattice, SineGrid, TorusGrid};
pub use nonlinearity::{
    BlockRotation, ConstantForcing, HopfCycle, LinearMap, Model, Nonlinearity,
    ZeroNonlinearity,
};
pub use rde::{
    rde_nonlinearity, saturated_chafee_infante, saturated_rde_model, smooth_step, smooth_step_slope,
    RdeNonlinearity, ScalarField, SMOOTH_STEP_MAX_SLOPE,
};
pub use spectra::*;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error("nonlinearity acts on {got} modes, spectrum has {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("grid has {points} points, needs more than {modes} for {modes} modes")]
    GridTooCoarse { points: usize, modes: usize },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ModelError>;
