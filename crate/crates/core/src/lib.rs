//! Fluxonium qubit modelling: spectra and matrix elements, decoherence
//! budgets and loss inversions, cavity and qubit-qubit couplings, and
//! spectroscopy fits.

pub mod constants;
pub mod cqed;
pub mod error;
pub mod fit;
pub mod format;
pub mod noise;
pub mod registry;
pub mod reproduce;
pub mod spectrum;

pub use error::{Error, Result};
