//! Single-channel relaxation and dephasing rates.
//!
//! All relaxation formulas follow Fermi's golden rule for a noise source
//! coupled to the phase, Gamma = |<0|Phi|1>|^2 S_II / hbar^2 with
//! S_II = hbar omega Re Y(omega) (coth(hbar omega / 2 k_B T) + 1), reduced to
//! closed forms in the dimensionless phase matrix element phi01. Frequencies
//! are GHz, temperatures mK, rates 1/s.

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::Serialize;

use crate::constants::{ghz_to_angular, ghz_to_joule, E_CHARGE, H, HBAR, K_B, PHI0};
use crate::error::{Error, Result};
use crate::spectrum::CircuitParams;

/// Reference frequency of the capacitive loss tangent, GHz.
pub const REFERENCE_FREQUENCY_GHZ: f64 = 6.0;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(format!("{name} must be >= 0 and finite, got {v}")));
    }
    Ok(())
}

/// Stimulated-emission enhancement (coth(h f / 2 k_B T) + 1) / 2 >= 1.
pub fn thermal_factor(f01_ghz: f64, t_mk: f64) -> Result<f64> {
    check_positive("f01", f01_ghz)?;
    check_non_negative("T", t_mk)?;
    if t_mk == 0.0 {
        return Ok(1.0);
    }
    let x = H * f01_ghz * 1e9 / (2.0 * K_B * t_mk * 1e-3);
    Ok(0.5 * (1.0 / x.tanh() + 1.0))
}

/// tan delta_C(f) = tan delta_C(6 GHz) (f / 6 GHz)^eps
pub fn tan_delta_at(f01_ghz: f64, tan_delta_6ghz: f64, eps: f64) -> f64 {
    tan_delta_6ghz * (f01_ghz / REFERENCE_FREQUENCY_GHZ).powf(eps)
}

/// Lossy shunt capacitance: tan_delta (hbar omega^2 / 8 E_C) phi01^2 (coth + 1).
pub fn dielectric_rate(f01_ghz: f64, phi01: f64, e_c_ghz: f64, tan_delta: f64, t_mk: f64) -> Result<f64> {
    let enhancement = 2.0 * thermal_factor(f01_ghz, t_mk)?;
    let omega = ghz_to_angular(f01_ghz);
    Ok(tan_delta * HBAR * omega * omega / (8.0 * ghz_to_joule(e_c_ghz)) * phi01 * phi01 * enhancement)
}

/// Lossy shunt inductance: tan_delta_L (E_L / hbar) phi01^2 (coth + 1).
pub fn inductive_rate(f01_ghz: f64, phi01: f64, e_l_ghz: f64, tan_delta_l: f64, t_mk: f64) -> Result<f64> {
    let enhancement = 2.0 * thermal_factor(f01_ghz, t_mk)?;
    Ok(tan_delta_l * ghz_to_joule(e_l_ghz) / HBAR * phi01 * phi01 * enhancement)
}

/// Quasiparticle tunnelling in the chain:
/// |<0|phi/2|1>|^2 (8 E_L / pi hbar) x_qp sqrt(2 Delta / hbar omega01).
pub fn quasiparticle_rate(f01_ghz: f64, phi01: f64, e_l_ghz: f64, x_qp: f64, delta_ghz: f64) -> Result<f64> {
    check_positive("f01", f01_ghz)?;
    check_positive("Delta", delta_ghz)?;
    let half = 0.5 * phi01;
    Ok(half * half * 8.0 * ghz_to_joule(e_l_ghz) / (PI * HBAR) * x_qp * (2.0 * delta_ghz / f01_ghz).sqrt())
}

/// 1/f flux noise through the persistent current Phi/L:
/// (1/hbar^2)(1/L^2)|<0|Phi|1>|^2 S_Phi(omega), S_Phi = 2 pi A^2 / omega.
pub fn flux_relaxation_rate(f01_ghz: f64, phi01: f64, params: &CircuitParams, amplitude: f64) -> Result<f64> {
    check_positive("f01", f01_ghz)?;
    let omega = ghz_to_angular(f01_ghz);
    let flux_element = HBAR / (2.0 * E_CHARGE) * phi01;
    let a_si = amplitude * PHI0;
    let s_phi = 2.0 * PI * a_si * a_si / omega;
    let l = params.inductance();
    Ok(flux_element * flux_element * s_phi / (HBAR * HBAR * l * l))
}

/// Lossy chain-junction oxide. The chain presents C_J / N in parallel with the
/// antenna, so the dielectric form is rescaled by C_J / (N C).
pub fn junction_oxide_rate(
    f01_ghz: f64,
    phi01: f64,
    params: &CircuitParams,
    tan_delta_alox: f64,
    c_j_ff: f64,
    t_mk: f64,
) -> Result<f64> {
    let participation = c_j_ff * 1e-15 / (params.n_junctions as f64 * params.capacitance());
    Ok(dielectric_rate(f01_ghz, phi01, params.e_c, tan_delta_alox, t_mk)? * participation)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxDephasing {
    /// Gaussian decay exp(-(Gamma t)^2); this is the inverse 1/e time.
    pub first_order: f64,
    pub second_order: f64,
}

/// 1/f flux dephasing from the flux slope (GHz/Phi0) and curvature
/// (GHz/Phi0^2): Gamma_1 = |d omega/d Phi| A sqrt(ln 2),
/// Gamma_2 = |d^2 omega / d Phi^2| A^2, both in angular units.
pub fn flux_dephasing(slope: f64, curvature: f64, amplitude: f64) -> Result<FluxDephasing> {
    check_non_negative("A", amplitude)?;
    Ok(FluxDephasing {
        first_order: ghz_to_angular(slope.abs()) * amplitude * 2f64.ln().sqrt(),
        second_order: ghz_to_angular(curvature.abs()) * amplitude * amplitude,
    })
}

/// Dephasing by thermal photons in the readout mode,
/// Gamma = (kappa/2) Re[sqrt((1 + 2i chi/kappa)^2 + 8i chi n_th / kappa) - 1].
/// `chi_hz` and `kappa_hz` are chi/2pi and kappa/2pi.
pub fn thermal_photon_dephasing(chi_hz: f64, kappa_hz: f64, n_th: f64) -> Result<f64> {
    check_positive("kappa", kappa_hz)?;
    check_non_negative("n_th", n_th)?;
    if n_th == 0.0 || chi_hz == 0.0 {
        return Ok(0.0);
    }
    let a = chi_hz / kappa_hz;
    // u - 1 written out to avoid cancelling against the trailing -1.
    let u_minus_1 = Complex::new(-4.0 * a * a, 4.0 * a + 8.0 * a * n_th);
    let z = (u_minus_1 + 1.0).sqrt();
    let re = (u_minus_1 / (z + 1.0)).re;
    Ok((PI * kappa_hz * re).max(0.0))
}

/// Thermal photon number that produces the given dephasing rate.
pub fn thermal_photons_for_rate(chi_hz: f64, kappa_hz: f64, rate: f64) -> Result<f64> {
    check_non_negative("rate", rate)?;
    if rate == 0.0 {
        return Ok(0.0);
    }
    let f = |n: f64| thermal_photon_dephasing(chi_hz, kappa_hz, n);
    let mut hi = 1.0;
    while f(hi)? < rate {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Inversion {
                channel: "thermal_photon".into(),
                reason: format!("rate {rate} unreachable"),
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inductive loss tangent giving the same T1 as `tan_delta_c`:
/// tan_delta_L = tan_delta_C (h f01)^2 / (8 E_C E_L) = tan_delta_C omega^2 L C.
pub fn derived_tan_delta_l(params: &CircuitParams, f01_ghz: f64, tan_delta_c: f64) -> f64 {
    let energy_form = tan_delta_c * f01_ghz * f01_ghz / (8.0 * params.e_c * params.e_l);
    let omega = ghz_to_angular(f01_ghz);
    let circuit_form = tan_delta_c * omega * omega * params.inductance() * params.capacitance();
    assert!(
        (energy_form - circuit_form).abs() <= 1e-12 * energy_form.abs(),
        "tan_delta_L forms disagree: {energy_form} vs {circuit_form}"
    );
    energy_form
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainAux {
    /// C_g N / 6, fF
    pub c_chain_ff: f64,
    /// N T2, ms
    pub photon_free_time_ms: f64,
}

/// Chain ground-capacitance contribution and the per-mode photon-free time
/// required for a coherence time `t2_us`.
pub fn chain_aux(n_junctions: u32, c_g_ff: f64, t2_us: f64) -> Result<ChainAux> {
    if n_junctions < 1 {
        return Err(Error::invalid("junction count must be >= 1"));
    }
    check_non_negative("C_g", c_g_ff)?;
    check_non_negative("T2", t2_us)?;
    let n = n_junctions as f64;
    Ok(ChainAux {
        c_chain_ff: c_g_ff * n / 6.0,
        photon_free_time_ms: n * t2_us * 1e-3,
    })
}

/// T1 |<0|phi|1>|^2 in us, proportional to 1/S_phi(omega).
pub fn normalized_t1(t1_us: f64, phi01: f64) -> Result<f64> {
    check_positive("T1", t1_us)?;
    Ok(t1_us * phi01 * phi01)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn device_a() -> CircuitParams {
        CircuitParams::new(3.0, 0.84, 1.0, 100).unwrap()
    }

    // coth from exponentials, independent of the tanh route above.
    fn coth_oracle(x: f64) -> f64 {
        let e = (-2.0 * x).exp();
        (1.0 + e) / (1.0 - e)
    }

    #[test]
    fn thermal_factor_limits() {
        assert_eq!(thermal_factor(0.5, 0.0).unwrap(), 1.0);
        let cold = thermal_factor(10.0, 20.0).unwrap();
        assert!(cold >= 1.0 && cold - 1.0 < 1e-10);
        // f = 0.5 GHz at 25 mK: x = h f / 2 k T
        let x = H * 0.5e9 / (2.0 * K_B * 0.025);
        let expected = 0.5 * (coth_oracle(x) + 1.0);
        let got = thermal_factor(0.5, 25.0).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 1.6205).abs() < 1e-3, "{got}");
        // linearised k_B T / h f + 1 is the high-temperature asymptote
        let linear = K_B * 0.025 / (H * 0.5e9) + 1.0;
        assert!((linear - 2.04).abs() < 0.01);
        assert!(thermal_factor(0.0, 20.0).is_err());
    }

    #[test]
    fn thermal_factor_high_temperature_asymptote() {
        // (coth(r/2) + 1)/2 = 1/r + 1/2 + r/12 + O(r^3) with r = h f / k_B T
        for ratio in [0.01, 0.03, 0.049] {
            let t_mk = 1e3 * H * 1e9 / (K_B * ratio);
            let exact = thermal_factor(1.0, t_mk).unwrap();
            let asym = 1.0 / ratio + 0.5;
            assert!((exact - asym).abs() / asym < 1e-3);
            let linearised = 1.0 / ratio + 1.0;
            assert!((exact - linearised).abs() / linearised < 0.025);
        }
    }

    #[test]
    fn zero_loss_gives_zero_rates() {
        let p = device_a();
        assert_eq!(dielectric_rate(0.78, 1.9, 0.84, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(inductive_rate(0.78, 1.9, 1.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(quasiparticle_rate(0.78, 1.9, 1.0, 0.0, 44.0).unwrap(), 0.0);
        assert_eq!(flux_relaxation_rate(0.78, 1.9, &p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn dielectric_closed_form_matches_golden_rule_chain() {
        // Gamma = |<0|Phi|1>|^2 / hbar^2 * hbar omega Re Y (coth + 1), Re Y = omega C tan
        let p = device_a();
        let (f, phi, tan, t) = (0.78, 1.87, 1.7e-6, 20.0);
        let omega = ghz_to_angular(f);
        let flux = HBAR / (2.0 * E_CHARGE) * phi;
        let x = HBAR * omega / (2.0 * K_B * t * 1e-3);
        let s_ii = HBAR * omega * (omega * p.capacitance() * tan) * (coth_oracle(x) + 1.0);
        let expected = flux * flux * s_ii / (HBAR * HBAR);
        let got = dielectric_rate(f, phi, p.e_c, tan, t).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inductive_closed_form_matches_admittance_chain() {
        let p = device_a();
        let (f, phi, tan, t) = (0.78, 1.87, 1.5e-7, 20.0);
        let omega = ghz_to_angular(f);
        let flux = HBAR / (2.0 * E_CHARGE) * phi;
        let x = HBAR * omega / (2.0 * K_B * t * 1e-3);
        let s_ii = HBAR * omega * (tan / (omega * p.inductance())) * (coth_oracle(x) + 1.0);
        let expected = flux * flux * s_ii / (HBAR * HBAR);
        let got = inductive_rate(f, phi, p.e_l, tan, t).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_t1_loss_tangent_ratio() {
        let p = device_a();
        let (f, phi, t) = (0.78, 1.87, 20.0);
        let tan_c = 1.7e-6;
        let tan_l = derived_tan_delta_l(&p, f, tan_c);
        let a = dielectric_rate(f, phi, p.e_c, tan_c, t).unwrap();
        let b = inductive_rate(f, phi, p.e_l, tan_l, t).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
        // device A column: 15.4e-8
        assert!((tan_l - 15.4e-8).abs() / 15.4e-8 < 0.005, "{tan_l}");
        assert_eq!(derived_tan_delta_l(&p, f, 0.0), 0.0);
    }

    #[test]
    fn flux_relaxation_is_negligible_for_device_a() {
        let p = device_a();
        let rate = flux_relaxation_rate(0.78, 1.87, &p, 2e-6).unwrap();
        // independent SI evaluation: (Phi01 / L)^2 S_Phi / hbar^2
        let flux = HBAR / (2.0 * E_CHARGE) * 1.87;
        let current = flux / p.inductance();
        let s_phi = 2.0 * PI * (2e-6 * PHI0).powi(2) / ghz_to_angular(0.78);
        let expected = current * current * s_phi / (HBAR * HBAR);
        assert!((rate / expected - 1.0).abs() < 1e-12);
        let t1_ms = 1e3 / rate;
        assert!(t1_ms > 10.0 && t1_ms * 1e3 > 100.0 * 110.0, "{t1_ms} ms");
    }

    #[test]
    fn gaussian_dephasing_off_sweet_spot() {
        let d = flux_dephasing(20.0, 0.0, 1.8e-6).unwrap();
        let t2_us = 1e6 / d.first_order;
        assert!((3.0..=6.0).contains(&t2_us), "{t2_us}");
        assert!((t2_us - 5.310).abs() < 0.005, "{t2_us}");
        assert_eq!(flux_dephasing(0.0, 0.0, 2e-6).unwrap().first_order, 0.0);
    }

    #[test]
    fn thermal_photon_weak_dispersive_limit() {
        let kappa = 15e6;
        let chi = 1e-3 * kappa;
        let n = 0.1;
        let exact = thermal_photon_dephasing(chi, kappa, n).unwrap();
        // leading order 4 chi^2 n (n + 1) / kappa, angular chi and kappa
        let weak = 4.0 * (2.0 * PI * chi).powi(2) * n * (1.0 + n) / (2.0 * PI * kappa);
        assert!((exact / weak - 1.0).abs() < 1e-3, "{exact} vs {weak}");
        let small_n = 1e-4;
        let e = thermal_photon_dephasing(chi, kappa, small_n).unwrap();
        let w = 4.0 * (2.0 * PI * chi).powi(2) * small_n / (2.0 * PI * kappa);
        assert!((e / w - 1.0).abs() < 1e-3);
        assert_eq!(thermal_photon_dephasing(chi, kappa, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn thermal_photons_needed_for_350_us() {
        let n = thermal_photons_for_rate(0.08e6, 15e6, 1.0 / 350e-6).unwrap();
        // the weak-coupling estimate 4 chi^2 n / kappa would give 0.27
        assert!((n - 0.219).abs() < 0.002, "{n}");
        let back = thermal_photon_dephasing(0.08e6, 15e6, n).unwrap();
        assert!((back * 350e-6 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chain_numbers() {
        let a = chain_aux(400, 0.0, 140.0).unwrap();
        assert!((a.photon_free_time_ms - 56.0).abs() < 1e-12);
        let b = chain_aux(1, 0.06, 0.0).unwrap();
        assert!((b.c_chain_ff - 0.01).abs() < 1e-15);
        assert!((chain_aux(100, 0.0, 160.0).unwrap().photon_free_time_ms - 16.0).abs() < 1e-12);
        assert!(chain_aux(0, 0.1, 1.0).is_err());
    }

    #[test]
    fn normalized_t1_scaling() {
        assert_eq!(normalized_t1(110.0, 1.0).unwrap(), 110.0);
        let one = normalized_t1(110.0, 1.3).unwrap();
        let two = normalized_t1(110.0, 2.6).unwrap();
        assert!((two / one - 4.0).abs() < 1e-12);
        assert!(normalized_t1(0.0, 1.0).is_err());
    }
}
