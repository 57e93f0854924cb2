use std::f64::consts::PI;

use super::operators::OscillatorBasis;
use super::solve::sorted_eigen;
use super::{BasisConfig, CircuitParams, FluxBias};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    /// d f01 / d f, GHz per flux quantum
    First,
    /// d^2 f01 / d f^2, GHz per flux quantum squared
    Second,
}

impl TryFrom<u8> for DerivativeOrder {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            1 => Ok(DerivativeOrder::First),
            2 => Ok(DerivativeOrder::Second),
            _ => Err(Error::invalid(format!("derivative order must be 1 or 2, got {order}"))),
        }
    }
}

const DEGENERACY_GHZ: f64 = 1e-6;
const SECOND_ORDER_STEP: f64 = 1e-4;
const RICHARDSON_REL_TOL: f64 = 1e-3;

/// Hellmann-Feynman slope of f01 with respect to f.
///
/// dH/dphi_ext = -E_J sin(phi - phi_ext), so
/// d f01 / d f = 2 pi (<1|dH|1> - <0|dH|0>).
fn slope(params: &CircuitParams, flux: FluxBias, osc: &OscillatorBasis) -> Result<f64> {
    let phase = flux.phase();
    let (values, vectors) = sorted_eigen(osc.hamiltonian(params.e_j, phase));
    for (lower, upper) in [(0, 1), (1, 2)] {
        let gap = values[upper] - values[lower];
        if gap < DEGENERACY_GHZ {
            return Err(Error::Degenerate { lower, upper, gap });
        }
    }
    let sin = osc.sin_matrix(phase);
    let expect = |k: usize| {
        let v = vectors.column(k);
        -params.e_j * v.dot(&(&sin * v))
    };
    Ok(2.0 * PI * (expect(1) - expect(0)))
}

/// Flux derivative of the 0-1 transition frequency.
///
/// First order is exact for the truncated matrix (Hellmann-Feynman). Second
/// order is a central difference of first-order values with step 1e-4 Phi0,
/// refined by one Richardson step at half the step; if the two estimates
/// disagree by more than 0.1 % the derivative is reported as unstable.
pub fn flux_derivative(
    params: &CircuitParams,
    flux: FluxBias,
    order: DerivativeOrder,
    basis: &BasisConfig,
) -> Result<f64> {
    params.validate()?;
    basis.validate()?;
    FluxBias::new(flux.0)?;
    let osc = OscillatorBasis::new(params, basis.dim);
    match order {
        DerivativeOrder::First => slope(params, flux, &osc),
        DerivativeOrder::Second => {
            let central = |h: f64| -> Result<f64> {
                let up = slope(params, FluxBias(flux.0 + h), &osc)?;
                let down = slope(params, FluxBias(flux.0 - h), &osc)?;
                Ok((up - down) / (2.0 * h))
            };
            let coarse = central(SECOND_ORDER_STEP)?;
            let fine = central(0.5 * SECOND_ORDER_STEP)?;
            let refined = (4.0 * fine - coarse) / 3.0;
            let spread = (fine - coarse).abs();
            if spread > RICHARDSON_REL_TOL * refined.abs().max(1e-9) {
                return Err(Error::invalid(format!(
                    "second derivative unstable at f = {}: {coarse} vs {fine}",
                    flux.0
                )));
            }
            Ok(refined)
        }
    }
}
