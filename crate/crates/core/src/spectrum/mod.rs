//! Fluxonium Hamiltonian, its spectrum, and the matrix elements derived from it.
//!
//! The circuit Hamiltonian is
//!
//! ```text
//! H = 4 E_C n^2 + 1/2 E_L phi^2 - E_J cos(phi - phi_ext)
//! ```
//!
//! with `[phi, n] = i`. Energies are in GHz (E/h) and the external flux is
//! measured in flux quanta, `phi_ext = 2 pi f`.

mod derivative;
mod grid;
mod operators;
mod solve;

#[cfg(test)]
mod properties;

pub use derivative::{flux_derivative, DerivativeOrder};
pub use grid::{grid_oracle, grid_oracle_with, GridConfig};
pub use operators::{charge_operator, displacement_magnitudes, phase_operator, OscillatorBasis};
pub(crate) use solve::sorted_eigen;
pub use solve::{flux_sweep, make_hamiltonian, spectrum, spectrum_unchecked, transitions};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{Error, Result};

/// The fluxonium parameter triple plus chain length. Identifies a device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    #[serde(rename = "E_J_GHz")]
    pub e_j: f64,
    #[serde(rename = "E_C_GHz")]
    pub e_c: f64,
    #[serde(rename = "E_L_GHz")]
    pub e_l: f64,
    #[serde(rename = "N")]
    pub n_junctions: u32,
}

impl CircuitParams {
    pub fn new(e_j: f64, e_c: f64, e_l: f64, n_junctions: u32) -> Result<Self> {
        let p = CircuitParams {
            e_j,
            e_c,
            e_l,
            n_junctions,
        };
        p.validate()?;
        Ok(p)
    }

    /// `E_J = 0` is accepted: it is the harmonic limit used for checks.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("E_J", self.e_j), ("E_C", self.e_c), ("E_L", self.e_l)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.e_j < 0.0 {
            return Err(Error::invalid(format!("E_J must be >= 0, got {}", self.e_j)));
        }
        if self.e_c <= 0.0 || self.e_l <= 0.0 {
            return Err(Error::invalid(format!(
                "E_C and E_L must be positive, got E_C={} E_L={}",
                self.e_c, self.e_l
            )));
        }
        if self.n_junctions < 1 {
            return Err(Error::invalid("junction count N must be >= 1"));
        }
        Ok(())
    }

    /// Soft checks against the fluxonium regime `E_L << E_J`, `1 <~ E_J/E_C <~ 10`.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.e_l >= self.e_j {
            out.push(format!(
                "E_L = {} GHz is not small compared to E_J = {} GHz",
                self.e_l, self.e_j
            ));
        }
        let ratio = self.e_j / self.e_c;
        if !(1.0..=10.0).contains(&ratio) {
            out.push(format!("E_J/E_C = {ratio:.3} lies outside [1, 10]"));
        }
        out
    }

    /// Shunt capacitance C = e^2 / 2E_C, in farads.
    pub fn capacitance(&self) -> f64 {
        constants::capacitance_from_ec(self.e_c)
    }

    /// Shunt inductance L = (hbar/2e)^2 / E_L, in henries.
    pub fn inductance(&self) -> f64 {
        constants::inductance_from_el(self.e_l)
    }

    /// Frequency of the linear part, sqrt(8 E_L E_C), in GHz.
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_l * self.e_c).sqrt()
    }

    /// Zero-point phase fluctuation (2 E_C / E_L)^(1/4).
    pub fn phi_zpf(&self) -> f64 {
        (2.0 * self.e_c / self.e_l).powf(0.25)
    }
}

/// External flux in units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FluxBias(pub f64);

impl FluxBias {
    pub const SWEET_SPOT: FluxBias = FluxBias(0.5);

    pub fn new(f: f64) -> Result<Self> {
        if !f.is_finite() {
            return Err(Error::invalid(format!("flux must be finite, got {f}")));
        }
        Ok(FluxBias(f))
    }

    pub fn phi0(self) -> f64 {
        self.0
    }

    /// Reduced flux phi_ext = 2 pi f, in radians.
    pub fn phase(self) -> f64 {
        2.0 * PI * self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    pub dim: usize,
    /// Eigenvalue convergence tolerance in GHz.
    pub tol: f64,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig { dim: 60, tol: 1e-6 }
    }
}

impl BasisConfig {
    pub fn with_dim(dim: usize) -> Self {
        BasisConfig {
            dim,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 10 {
            return Err(Error::invalid(format!("basis dim must be >= 10, got {}", self.dim)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// How the eigenvectors of a [`Spectrum`] are represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Representation {
    /// Coefficients in the number basis of the linear (E_J = 0) oscillator.
    Oscillator { phi_zpf: f64 },
    /// Wavefunction samples on a uniform phase grid (unit-normalized sums).
    PhaseGrid { phi_max: f64, step: f64 },
}

/// Lowest eigenpairs of the Hamiltonian at one flux bias.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub params: CircuitParams,
    pub flux: FluxBias,
    pub basis: BasisConfig,
    /// Eigenvalues in GHz, ascending.
    pub energies: Vec<f64>,
    /// One column per retained level.
    pub eigenvectors: DMatrix<f64>,
    pub representation: Representation,
    phase_elements: DMatrix<f64>,
    // <i|n|j> = i * charge_elements[(i, j)]; real antisymmetric.
    charge_elements: DMatrix<f64>,
}

impl Spectrum {
    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    /// E_j - E_i in GHz.
    pub fn frequency(&self, i: usize, j: usize) -> f64 {
        self.energies[j] - self.energies[i]
    }

    /// Signed matrix element <i|phi|j> in the sign convention of the eigenvectors.
    pub fn phase_element(&self, i: usize, j: usize) -> f64 {
        self.phase_elements[(i, j)]
    }

    /// Real amplitude c such that <i|n|j> = i c.
    pub fn charge_element(&self, i: usize, j: usize) -> f64 {
        self.charge_elements[(i, j)]
    }

    pub fn phase_matrix(&self) -> &DMatrix<f64> {
        &self.phase_elements
    }

    pub fn charge_matrix(&self) -> &DMatrix<f64> {
        &self.charge_elements
    }
}

/// One (i, j) transition with j > i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub i: usize,
    pub j: usize,
    /// GHz
    pub f_ij: f64,
    /// |<i|phi|j>| in radians
    pub phi_ij: f64,
    /// |<i|n|j>| in Cooper pairs
    pub n_ij: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionTable {
    pub flux: FluxBias,
    pub n_levels: usize,
    /// Ordered by (i, j).
    pub entries: Vec<Transition>,
}

impl TransitionTable {
    pub fn get(&self, i: usize, j: usize) -> Option<&Transition> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == j || j >= self.n_levels {
            return None;
        }
        // Row-major index into the strict upper triangle.
        let idx = i * (2 * self.n_levels - i - 1) / 2 + (j - i - 1);
        self.entries.get(idx)
    }

    /// Signed E_j - E_i, usable in either order.
    pub fn frequency(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(0.0);
        }
        let t = self.get(i, j)?;
        Some(if i < j { t.f_ij } else { -t.f_ij })
    }

    pub fn f01(&self) -> f64 {
        self.entries[0].f_ij
    }

    /// omega_12 / omega_01; `None` with fewer than three levels.
    pub fn anharmonicity_ratio(&self) -> Option<f64> {
        Some(self.get(1, 2)?.f_ij / self.get(0, 1)?.f_ij)
    }
}
