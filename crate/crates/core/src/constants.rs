//! Physical constants (exact SI 2019 values) and unit helpers.
//!
//! Energies are carried in GHz (E/h) throughout the crate; these helpers
//! convert to joules and angular frequencies where the loss formulas need
//! SI quantities.

use std::f64::consts::PI;

/// Planck constant (J s).
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = H / (2.0 * PI);
/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Superconducting flux quantum h/2e (Wb).
pub const PHI0: f64 = H / (2.0 * E_CHARGE);

/// Grouped constants, handy for reports that list every constant used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub h: f64,
    pub hbar: f64,
    pub e: f64,
    pub k_b: f64,
    pub phi0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            h: H,
            hbar: HBAR,
            e: E_CHARGE,
            k_b: K_B,
            phi0: PHI0,
        }
    }
}

/// GHz (as E/h) to joules.
pub fn ghz_to_joule(ghz: f64) -> f64 {
    ghz * 1e9 * H
}

/// GHz to angular frequency (rad/s).
pub fn ghz_to_angular(ghz: f64) -> f64 {
    2.0 * PI * ghz * 1e9
}

/// Capacitance (F) from a charging energy in GHz, E_C = e^2 / 2C.
pub fn capacitance_from_ec(ec_ghz: f64) -> f64 {
    E_CHARGE * E_CHARGE / (2.0 * ghz_to_joule(ec_ghz))
}

/// Inductance (H) from an inductive energy in GHz, E_L = (hbar/2e)^2 / L.
pub fn inductance_from_el(el_ghz: f64) -> f64 {
    let reduced = HBAR / (2.0 * E_CHARGE);
    reduced * reduced / ghz_to_joule(el_ghz)
}
