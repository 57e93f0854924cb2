use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{DataPoint, SpectroscopyDataset, TransitionLabel, DEFAULT_SIGMA_GHZ};
use crate::error::{Error, Result};
use crate::spectrum::{spectrum, BasisConfig, CircuitParams, FluxBias, Spectrum};

/// Linear map from coil bias to flux: f = offset + scale * bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxCalibration {
    #[serde(rename = "offset_phi0")]
    pub offset: f64,
    #[serde(rename = "scale_phi0_per_bias")]
    pub scale: f64,
}

impl FluxCalibration {
    pub fn flux(&self, bias: f64) -> FluxBias {
        FluxBias(self.offset + self.scale * bias)
    }
}

/// Line frequency for one label from an already-solved spectrum.
pub(crate) fn line_frequency(spec: &Spectrum, label: TransitionLabel, f_readout: f64) -> Result<f64> {
    let (i, j) = label.levels();
    if j >= spec.n_levels() {
        return Err(Error::invalid(format!("label {label} needs {} levels", j + 1)));
    }
    let f_ij = spec.frequency(i, j);
    match label {
        TransitionLabel::Direct { .. } => Ok(f_ij),
        TransitionLabel::RedSideband { .. } => {
            let value = f_ij - f_readout;
            if value < 0.0 {
                return Err(Error::NegativeSideband {
                    label: label.to_string(),
                    value,
                });
            }
            Ok(value)
        }
    }
}

/// Predicted line position in GHz at a coil bias.
pub fn forward_model(
    params: &CircuitParams,
    calib: &FluxCalibration,
    bias: f64,
    label: TransitionLabel,
    f_readout: f64,
    basis: &BasisConfig,
) -> Result<f64> {
    let levels = label.levels_needed().max(2);
    let spec = spectrum(params, calib.flux(bias), levels, basis)?;
    line_frequency(&spec, label, f_readout)
}

/// Forward-model points on every (bias, label) pair, bias-major, with seeded
/// Gaussian noise of width `noise_sigma`. Points carry `noise_sigma` as their
/// uncertainty, or the default linewidth when it is zero.
#[allow(clippy::too_many_arguments)]
pub fn synth_dataset(
    params: &CircuitParams,
    calib: &FluxCalibration,
    bias_grid: &[f64],
    labels: &[TransitionLabel],
    noise_sigma: f64,
    seed: u64,
    f_readout: f64,
    basis: &BasisConfig,
) -> Result<SpectroscopyDataset> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::invalid(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let levels = labels.iter().map(|l| l.levels_needed()).max().unwrap_or(2).max(2);
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = if noise_sigma > 0.0 {
        noise_sigma
    } else {
        DEFAULT_SIGMA_GHZ
    };
    let mut points = Vec::with_capacity(bias_grid.len() * labels.len());
    for &bias in bias_grid {
        let spec = spectrum(params, calib.flux(bias), levels, basis)?;
        for &label in labels {
            let exact = line_frequency(&spec, label, f_readout)?;
            let freq = if noise_sigma > 0.0 {
                exact + noise.sample(&mut rng)
            } else {
                exact
            };
            points.push(DataPoint {
                bias,
                freq,
                label,
                sigma,
            });
        }
    }
    Ok(SpectroscopyDataset { points })
}
