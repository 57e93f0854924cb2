//! Two-tone spectroscopy: forward model, synthetic data and least-squares
//! fits of (E_J, E_C, E_L) together with the flux calibration.

mod dataset;
mod model;
mod optimize;

pub use dataset::{DataPoint, SpectroscopyDataset, TransitionLabel, DEFAULT_SIGMA_GHZ};
pub use model::{forward_model, synth_dataset, FluxCalibration};
pub use optimize::{fit, FitInit, FitMethod, FitOptions, FitResult, Residual};

#[cfg(test)]
mod tests;
