use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::CouplingKind;
use crate::error::{Error, Result};
use crate::spectrum::{sorted_eigen, Spectrum, TransitionTable};

/// Readout resonator as seen by the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    #[serde(rename = "f_r_GHz")]
    pub f_r: f64,
    /// kappa / 2 pi
    #[serde(rename = "kappa_MHz")]
    pub kappa: f64,
    /// g / 2 pi
    #[serde(rename = "g_MHz")]
    pub g: f64,
    #[serde(default)]
    pub coupling_kind: CouplingKind,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("f_r", self.f_r), ("kappa", self.kappa)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("cavity {name} must be positive, got {v}")));
            }
        }
        // g = 0 is the trivial decoupled limit.
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::invalid(format!("cavity g must be >= 0, got {}", self.g)));
        }
        Ok(())
    }

    fn g_ghz(&self) -> f64 {
        self.g * 1e-3
    }
}

/// State-dependent cavity pulls in MHz; `chi01 = chi1 - chi0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersiveShift {
    #[serde(rename = "chi0_MHz")]
    pub chi0: f64,
    #[serde(rename = "chi1_MHz")]
    pub chi1: f64,
    #[serde(rename = "chi01_MHz")]
    pub chi01: f64,
}

fn element(t: &TransitionTable, kind: CouplingKind, i: usize, j: usize) -> f64 {
    let tr = t.get(i, j).expect("level index checked by caller");
    match kind {
        CouplingKind::Capacitive => tr.n_ij,
        CouplingKind::Inductive => tr.phi_ij,
    }
}

/// Second-order shift of levels 0 and 1,
/// chi_i = sum_j g^2 |O_ij|^2 2 f_ij / (f_ij^2 - f_r^2), with f_ij = E_j - E_i.
///
/// Positive chi_i means the cavity line is pulled down with the qubit in i.
/// Transitions out of 0 or 1 that sit within 10 g |O_ij| of the cavity are
/// rejected since the expansion no longer holds there.
pub fn dispersive_shift(trans: &TransitionTable, cavity: &CavityParams, n_levels: usize) -> Result<DispersiveShift> {
    cavity.validate()?;
    if n_levels < 2 || n_levels > trans.n_levels {
        return Err(Error::invalid(format!(
            "n_levels must lie in [2, {}], got {n_levels}",
            trans.n_levels
        )));
    }
    let g = cavity.g_ghz();
    let mut chi = [0.0; 2];
    for (i, chi_i) in chi.iter_mut().enumerate() {
        for j in 0..n_levels {
            if j == i {
                continue;
            }
            let f_ij = trans.frequency(i, j).expect("index in range");
            let o = element(trans, cavity.coupling_kind, i, j);
            let detuning = (f_ij.abs() - cavity.f_r).abs();
            let limit = 10.0 * g * o;
            if g > 0.0 && detuning < limit {
                return Err(Error::NearResonance {
                    i: i.min(j),
                    j: i.max(j),
                    f_ij: f_ij.abs(),
                    detuning,
                    limit,
                });
            }
            *chi_i += g * g * o * o * 2.0 * f_ij / (f_ij * f_ij - cavity.f_r * cavity.f_r);
        }
    }
    Ok(DispersiveShift {
        chi0: chi[0] * 1e3,
        chi1: chi[1] * 1e3,
        chi01: (chi[1] - chi[0]) * 1e3,
    })
}

/// chi01 from exact diagonalization of qubit (all retained levels) coupled to
/// a resonator truncated at `max_photons`, with the full (non-RWA) coupling
/// g O (a + a^dagger) for the phase or g n i(a - a^dagger) for the charge.
///
/// Sign convention matches [`dispersive_shift`]. Returns MHz.
pub fn dispersive_shift_exact(spec: &Spectrum, cavity: &CavityParams, max_photons: usize) -> Result<DispersiveShift> {
    cavity.validate()?;
    if !(1..=3).contains(&max_photons) {
        return Err(Error::invalid("max_photons must lie in [1, 3]"));
    }
    let nq = spec.n_levels();
    let np = max_photons + 1;
    let dim = nq * np;
    let g = cavity.g_ghz();
    let idx = |q: usize, p: usize| q * np + p;
    // Both couplings reduce to real symmetric products: for the charge,
    // n = iC with C antisymmetric and i(a - a^dag) anti-Hermitian times i.
    let (op, photon_sign) = match cavity.coupling_kind {
        CouplingKind::Inductive => (spec.phase_matrix().clone(), 1.0),
        CouplingKind::Capacitive => (-spec.charge_matrix().clone(), -1.0),
    };
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for q in 0..nq {
        for p in 0..np {
            h[(idx(q, p), idx(q, p))] = spec.energies[q] + cavity.f_r * p as f64;
        }
    }
    for q in 0..nq {
        for r in 0..nq {
            let o = op[(q, r)];
            if o == 0.0 {
                continue;
            }
            for p in 0..np - 1 {
                let amp = g * o * ((p + 1) as f64).sqrt();
                // <q, p+1| O (a^dag + s a) |r, p>
                h[(idx(q, p + 1), idx(r, p))] += amp;
                h[(idx(q, p), idx(r, p + 1))] += photon_sign * amp;
            }
        }
    }
    let h = (&h + h.transpose()) * 0.5;
    let (energies, vectors) = sorted_eigen(h);
    let dressed = |q: usize, p: usize| -> f64 {
        let k = idx(q, p);
        let best = (0..dim)
            .max_by(|&a, &b| vectors[(k, a)].abs().total_cmp(&vectors[(k, b)].abs()))
            .expect("non-empty");
        energies[best]
    };
    // cavity pull with the qubit in q, sign flipped to the perturbative convention
    let chi = |q: usize| -(dressed(q, 1) - dressed(q, 0) - cavity.f_r);
    let (c0, c1) = (chi(0), chi(1));
    Ok(DispersiveShift {
        chi0: c0 * 1e3,
        chi1: c1 * 1e3,
        chi01: (c1 - c0) * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{spectrum, transitions, BasisConfig, CircuitParams, FluxBias};

    fn cavity(g: f64) -> CavityParams {
        CavityParams {
            f_r: 7.5,
            kappa: 15.0,
            g,
            coupling_kind: CouplingKind::Capacitive,
        }
    }

    fn device_a_spec(levels: usize) -> Spectrum {
        let p = CircuitParams::new(3.0, 0.84, 1.0, 100).unwrap();
        spectrum(&p, FluxBias::SWEET_SPOT, levels, &BasisConfig::default()).unwrap()
    }

    #[test]
    fn zero_coupling_gives_zero_shift() {
        let t = transitions(&device_a_spec(10)).unwrap();
        let s = dispersive_shift(&t, &cavity(0.0), 10).unwrap();
        assert_eq!(s.chi01, 0.0);
    }

    #[test]
    fn two_level_truncation_is_the_single_transition_formula() {
        let t = transitions(&device_a_spec(10)).unwrap();
        let s = dispersive_shift(&t, &cavity(70.0), 2).unwrap();
        let tr = t.get(0, 1).unwrap();
        let g = 0.070;
        let single = g * g * tr.n_ij * tr.n_ij * 2.0 * tr.f_ij / (tr.f_ij * tr.f_ij - 7.5 * 7.5);
        assert!((s.chi0 * 1e-3 - single).abs() < 1e-15);
        assert!((s.chi1 * 1e-3 + single).abs() < 1e-15);
    }

    #[test]
    fn device_a_shift_within_factor_two() {
        let t = transitions(&device_a_spec(12)).unwrap();
        let s = dispersive_shift(&t, &cavity(70.0), 12).unwrap();
        let r = s.chi01.abs() / 0.27;
        assert!((0.5..=2.0).contains(&r), "{}", s.chi01);
    }

    #[test]
    fn near_resonant_transition_is_named() {
        let t = transitions(&device_a_spec(10)).unwrap();
        let mut c = cavity(70.0);
        c.f_r = t.get(0, 1).unwrap().f_ij + 1e-3;
        match dispersive_shift(&t, &c, 10) {
            Err(Error::NearResonance { i: 0, j: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perturbative_matches_exact() {
        let spec = device_a_spec(10);
        let t = transitions(&spec).unwrap();
        for kind in [CouplingKind::Capacitive, CouplingKind::Inductive] {
            let mut c = cavity(20.0);
            c.coupling_kind = kind;
            let pt = dispersive_shift(&t, &c, 10).unwrap();
            let ex = dispersive_shift_exact(&spec, &c, 3).unwrap();
            assert!(
                (pt.chi01 / ex.chi01 - 1.0).abs() < 0.1,
                "{kind:?}: {} vs {}",
                pt.chi01,
                ex.chi01
            );
        }
    }

    #[test]
    fn sign_flips_across_a_two_level_resonance() {
        let t = transitions(&device_a_spec(10)).unwrap();
        let f01 = t.f01();
        let mut below = cavity(1.0);
        below.f_r = 0.5 * f01;
        let mut above = cavity(1.0);
        above.f_r = 2.0 * f01;
        let a = dispersive_shift(&t, &below, 2).unwrap().chi01;
        let b = dispersive_shift(&t, &above, 2).unwrap().chi01;
        assert!(a * b < 0.0);
    }
}
