use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::CouplingKind;
use crate::error::{Error, Result};
use crate::spectrum::{sorted_eigen, CircuitParams, FluxBias, Spectrum, TransitionTable};

/// Shared-capacitance or shared-junction coupling between two fluxonia.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitCoupling {
    pub kind: CouplingKind,
    #[serde(rename = "C_M_over_C", default, skip_serializing_if = "Option::is_none")]
    pub c_m_over_c: Option<f64>,
    /// Fraction of the chain shared between the two loops.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

impl TwoQubitCoupling {
    pub fn capacitive(c_m_over_c: f64) -> Self {
        TwoQubitCoupling {
            kind: CouplingKind::Capacitive,
            c_m_over_c: Some(c_m_over_c),
            m: None,
        }
    }

    pub fn inductive(m: f64) -> Self {
        TwoQubitCoupling {
            kind: CouplingKind::Inductive,
            c_m_over_c: None,
            m: Some(m),
        }
    }

    /// The kind's own parameter, checked.
    pub fn strength_parameter(&self) -> Result<f64> {
        let (value, name) = match (self.c_m_over_c, self.m) {
            (Some(_), Some(_)) => return Err(Error::invalid("coupling specifies both C_M_over_C and m")),
            (Some(c), None) if self.kind == CouplingKind::Capacitive => (c, "C_M_over_C"),
            (None, Some(m)) if self.kind == CouplingKind::Inductive => (m, "m"),
            _ => {
                let want = match self.kind {
                    CouplingKind::Capacitive => "C_M_over_C",
                    CouplingKind::Inductive => "m",
                };
                return Err(Error::invalid(format!("{:?} coupling requires {want}", self.kind)));
            }
        };
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::invalid(format!("{name} must be >= 0, got {value}")));
        }
        Ok(value)
    }

    pub fn warnings(&self) -> Vec<String> {
        match self.m {
            Some(m) if m > 0.3 => vec![format!("m = {m} is not small; J_L = m pi^2 E_L assumes m << 1")],
            _ => Vec::new(),
        }
    }
}

/// J in GHz. Capacitive: 2 sqrt(E_C,A E_C,B) C_M/C. Inductive: m pi^2
/// sqrt(E_L,A E_L,B). Both reduce to the textbook forms for identical qubits.
pub fn coupling_strength(a: &CircuitParams, b: &CircuitParams, coupling: &TwoQubitCoupling) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    let x = coupling.strength_parameter()?;
    Ok(match coupling.kind {
        CouplingKind::Capacitive => 2.0 * (a.e_c * b.e_c).sqrt() * x,
        CouplingKind::Inductive => x * PI * PI * (a.e_l * b.e_l).sqrt(),
    })
}

/// Coupling operator in the qubit eigenbasis, chosen real: n (as the real
/// antisymmetric C with n = iC) or phi / pi.
fn coupling_operator(spec: &Spectrum, kind: CouplingKind, n_keep: usize) -> DMatrix<f64> {
    match kind {
        CouplingKind::Capacitive => spec.charge_matrix().view((0, 0), (n_keep, n_keep)).into_owned(),
        CouplingKind::Inductive => spec.phase_matrix().view((0, 0), (n_keep, n_keep)) / PI,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoupledSpectrum {
    /// Joint eigenvalues, GHz, ascending.
    pub energies: Vec<f64>,
    /// Bare product state (a, b) assigned to each joint level.
    pub labels: Vec<(usize, usize)>,
    /// Set when the two largest bare overlaps differ by less than 1e-3.
    pub ambiguous: Vec<bool>,
    pub j_ghz: f64,
    pub n_keep: usize,
}

impl CoupledSpectrum {
    pub fn energy_of(&self, a: usize, b: usize) -> Option<f64> {
        self.labels.iter().position(|&l| l == (a, b)).map(|k| self.energies[k])
    }

    /// E_11 - E_10 - E_01 + E_00
    pub fn zz(&self) -> Option<f64> {
        Some(self.energy_of(1, 1)? - self.energy_of(1, 0)? - self.energy_of(0, 1)? + self.energy_of(0, 0)?)
    }
}

/// H_A + H_B + J O_A O_B in the product of the lowest `n_keep` eigenstates of
/// each qubit.
pub fn coupled_spectrum(
    spec_a: &Spectrum,
    spec_b: &Spectrum,
    coupling: &TwoQubitCoupling,
    n_keep: usize,
) -> Result<CoupledSpectrum> {
    if n_keep < 3 || n_keep > spec_a.n_levels() || n_keep > spec_b.n_levels() {
        return Err(Error::invalid(format!(
            "n_keep must lie in [3, {}], got {n_keep}",
            spec_a.n_levels().min(spec_b.n_levels())
        )));
    }
    let j = coupling_strength(&spec_a.params, &spec_b.params, coupling)?;
    let oa = coupling_operator(spec_a, coupling.kind, n_keep);
    let ob = coupling_operator(spec_b, coupling.kind, n_keep);
    // n_A n_B = (i C_A)(i C_B) = -C_A C_B
    let sign = match coupling.kind {
        CouplingKind::Capacitive => -1.0,
        CouplingKind::Inductive => 1.0,
    };
    let mut h = oa.kronecker(&ob) * (sign * j);
    for a in 0..n_keep {
        for b in 0..n_keep {
            h[(a * n_keep + b, a * n_keep + b)] += spec_a.energies[a] + spec_b.energies[b];
        }
    }
    let (energies, vectors) = sorted_eigen(h);
    let dim = n_keep * n_keep;

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
    for level in 0..dim {
        for bare in 0..dim {
            pairs.push((vectors[(bare, level)].powi(2), level, bare));
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut label = vec![usize::MAX; dim];
    let mut taken = vec![false; dim];
    for &(_, level, bare) in &pairs {
        if label[level] == usize::MAX && !taken[bare] {
            label[level] = bare;
            taken[bare] = true;
        }
    }
    let ambiguous = (0..dim)
        .map(|level| {
            let mut w: Vec<f64> = (0..dim).map(|bare| vectors[(bare, level)].powi(2)).collect();
            w.sort_by(|x, y| y.total_cmp(x));
            w[0] - w[1] < 1e-3
        })
        .collect();
    Ok(CoupledSpectrum {
        energies,
        labels: label.iter().map(|&k| (k / n_keep, k % n_keep)).collect(),
        ambiguous,
        j_ghz: j,
        n_keep,
    })
}

/// Ising-type spin model H = sum h_Z Z + h_X X + J_XX X X with Pauli
/// eigenvalues +-1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinModel {
    #[serde(rename = "h_Z_GHz")]
    pub h_z: [f64; 2],
    #[serde(rename = "h_X_GHz")]
    pub h_x: [f64; 2],
    #[serde(rename = "J_XX_GHz")]
    pub j_xx: f64,
    pub convention: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinProjection {
    #[serde(flatten)]
    pub model: SpinModel,
    pub warnings: Vec<String>,
}

/// Projects two coupled fluxonia onto their computational subspaces.
///
/// The spectra and tables must be taken at the sweet spot; `flux_a`, `flux_b`
/// are the actual biases. A small detuning delta f enters the inductive
/// energy as -2 pi delta f E_L phi, so h_X = 2 pi E_L <0|phi|1> delta f.
pub fn spin_projection(
    spec_a: &Spectrum,
    spec_b: &Spectrum,
    trans_a: &TransitionTable,
    trans_b: &TransitionTable,
    coupling: &TwoQubitCoupling,
    flux_a: FluxBias,
    flux_b: FluxBias,
) -> Result<SpinProjection> {
    let mut warnings = coupling.warnings();
    let j = coupling_strength(&spec_a.params, &spec_b.params, coupling)?;
    let mut h_z = [0.0; 2];
    let mut h_x = [0.0; 2];
    let mut o01 = [0.0; 2];
    for (k, (spec, trans, flux)) in [(spec_a, trans_a, flux_a), (spec_b, trans_b, flux_b)]
        .into_iter()
        .enumerate()
    {
        if (spec.flux.0 - 0.5).abs() > 1e-12 || (trans.flux.0 - 0.5).abs() > 1e-12 {
            return Err(Error::invalid("spin projection needs sweet-spot spectra"));
        }
        let detuning = flux.0 - 0.5;
        if detuning.abs() >= 0.1 {
            return Err(Error::invalid(format!(
                "qubit {k} bias {} is too far from the sweet spot (|f - 0.5| < 0.1)",
                flux.0
            )));
        }
        let t01 = trans
            .get(0, 1)
            .ok_or_else(|| Error::invalid("transition table lacks 0-1"))?;
        h_z[k] = 0.5 * t01.f_ij;
        h_x[k] = 2.0 * PI * spec.params.e_l * t01.phi_ij * detuning;
        o01[k] = match coupling.kind {
            CouplingKind::Capacitive => t01.n_ij,
            CouplingKind::Inductive => t01.phi_ij / PI,
        };
        match trans.anharmonicity_ratio() {
            Some(r) if r < 2.0 => warnings.push(format!(
                "qubit {k}: omega12/omega01 = {r:.3} < 2, the two-level projection is poor"
            )),
            None => warnings.push(format!("qubit {k}: no 1-2 transition to check leakage")),
            _ => {}
        }
    }
    Ok(SpinProjection {
        model: SpinModel {
            h_z,
            h_x,
            j_xx: j * o01[0] * o01[1],
            convention: "sigma_pm1",
        },
        warnings,
    })
}
