use serde::Serialize;

use super::channels::{
    dielectric_rate, flux_dephasing, flux_relaxation_rate, inductive_rate, junction_oxide_rate, quasiparticle_rate,
    tan_delta_at, thermal_photon_dephasing,
};
use super::env::{EnvironmentParams, Source};
use crate::constants::{E_CHARGE, H, HBAR, K_B, PHI0};
use crate::cqed::{dispersive_shift, CavityParams};
use crate::error::Result;
use crate::spectrum::{flux_derivative, spectrum, transitions, BasisConfig, CircuitParams, DerivativeOrder, FluxBias};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Dielectric,
    Inductive,
    Quasiparticle,
    FluxNoise,
    JunctionOxide,
    FluxFirstOrder,
    FluxSecondOrder,
    ThermalPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayShape {
    Exponential,
    Gaussian,
}

/// One channel's rate in 1/s; `None` when its parameters were not supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelRate {
    pub channel: Channel,
    pub evaluated: bool,
    #[serde(rename = "rate_per_s")]
    pub rate: Option<f64>,
    pub shape: DecayShape,
}

impl ChannelRate {
    fn new(channel: Channel, rate: Option<f64>, shape: DecayShape) -> Self {
        ChannelRate {
            channel,
            evaluated: rate.is_some(),
            rate,
            shape,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantUsed {
    pub name: &'static str,
    pub value: f64,
    pub unit: &'static str,
    pub source: Source,
}

/// Readout-mode inputs for the thermal-photon channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityInputs {
    pub cavity: CavityParams,
    pub n_th: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceBudget {
    pub params: CircuitParams,
    #[serde(rename = "flux_phi0")]
    pub flux: FluxBias,
    #[serde(rename = "f01_GHz")]
    pub f01: f64,
    pub phi01: f64,
    #[serde(rename = "slope_GHz_per_phi0")]
    pub slope: f64,
    #[serde(rename = "curvature_GHz_per_phi0sq")]
    pub curvature: f64,
    #[serde(rename = "chi01_MHz", skip_serializing_if = "Option::is_none")]
    pub chi01: Option<f64>,
    pub relaxation: Vec<ChannelRate>,
    pub dephasing: Vec<ChannelRate>,
    /// +inf when no relaxation channel contributes.
    #[serde(rename = "T1_us", serialize_with = "crate::format::serialize_lifetime")]
    pub t1_us: f64,
    #[serde(rename = "T2_us", serialize_with = "crate::format::serialize_lifetime")]
    pub t2_us: f64,
    pub constants: Vec<ConstantUsed>,
}

impl CoherenceBudget {
    pub fn relaxation_rate(&self) -> f64 {
        self.relaxation.iter().filter_map(|c| c.rate).sum()
    }

    pub fn dephasing_rate(&self) -> f64 {
        self.dephasing.iter().filter_map(|c| c.rate).sum()
    }

    pub fn rate(&self, channel: Channel) -> Option<f64> {
        self.relaxation
            .iter()
            .chain(&self.dephasing)
            .find(|c| c.channel == channel)
            .and_then(|c| c.rate)
    }
}

fn lifetime_us(rate: f64) -> f64 {
    if rate > 0.0 {
        1e6 / rate
    } else {
        f64::INFINITY
    }
}

/// All channels at one bias. 1/T1 is the sum of the relaxation rates; echo
/// 1/T2 = 1/(2 T1) + sum of dephasing rates, where the Gaussian first-order
/// flux channel contributes its 1/e rate.
pub fn budget(
    params: &CircuitParams,
    flux: FluxBias,
    env: &EnvironmentParams,
    cavity: Option<&CavityInputs>,
    basis: &BasisConfig,
) -> Result<CoherenceBudget> {
    params.validate()?;
    env.validate()?;
    let n_levels = (basis.dim / 3).clamp(2, 10);
    let spec = spectrum(params, flux, n_levels, basis)?;
    let trans = transitions(&spec)?;
    let f01 = trans.f01();
    let phi01 = trans.get(0, 1).expect("two levels").phi_ij;
    let slope = flux_derivative(params, flux, DerivativeOrder::First, basis)?;
    let curvature = flux_derivative(params, flux, DerivativeOrder::Second, basis)?;

    let (t_mk, t_src) = env.temperature();
    let (eps, eps_src) = env.eps();
    let (delta, delta_src) = env.delta();
    let (c_j, c_j_src) = env.junction_capacitance();

    let exp = DecayShape::Exponential;
    let dielectric = env
        .tan_delta_c
        .map(|tan6| dielectric_rate(f01, phi01, params.e_c, tan_delta_at(f01, tan6, eps), t_mk))
        .transpose()?;
    let inductive = env
        .tan_delta_l
        .map(|tan| inductive_rate(f01, phi01, params.e_l, tan, t_mk))
        .transpose()?;
    let qp = env
        .x_qp
        .map(|x| quasiparticle_rate(f01, phi01, params.e_l, x, delta))
        .transpose()?;
    let flux_relax = env
        .flux_noise
        .map(|a| flux_relaxation_rate(f01, phi01, params, a))
        .transpose()?;
    let oxide = env
        .tan_delta_alox
        .map(|tan| junction_oxide_rate(f01, phi01, params, tan, c_j, t_mk))
        .transpose()?;
    let relaxation = vec![
        ChannelRate::new(Channel::Dielectric, dielectric, exp),
        ChannelRate::new(Channel::Inductive, inductive, exp),
        ChannelRate::new(Channel::Quasiparticle, qp, exp),
        ChannelRate::new(Channel::FluxNoise, flux_relax, exp),
        ChannelRate::new(Channel::JunctionOxide, oxide, exp),
    ];

    let flux_dephase = env
        .flux_noise
        .map(|a| flux_dephasing(slope, curvature, a))
        .transpose()?;
    let (chi01, thermal) = match cavity {
        Some(c) => {
            let shift = dispersive_shift(&trans, &c.cavity, n_levels)?;
            let rate = thermal_photon_dephasing(shift.chi01 * 1e6, c.cavity.kappa * 1e6, c.n_th)?;
            (Some(shift.chi01), Some(rate))
        }
        None => (None, None),
    };
    let dephasing = vec![
        ChannelRate::new(
            Channel::FluxFirstOrder,
            flux_dephase.map(|d| d.first_order),
            DecayShape::Gaussian,
        ),
        ChannelRate::new(Channel::FluxSecondOrder, flux_dephase.map(|d| d.second_order), exp),
        ChannelRate::new(Channel::ThermalPhoton, thermal, exp),
    ];

    let gamma1: f64 = relaxation.iter().filter_map(|c| c.rate).sum();
    let gamma_phi: f64 = dephasing.iter().filter_map(|c| c.rate).sum();
    let constants = vec![
        ConstantUsed {
            name: "T",
            value: t_mk,
            unit: "mK",
            source: t_src,
        },
        ConstantUsed {
            name: "eps",
            value: eps,
            unit: "1",
            source: eps_src,
        },
        ConstantUsed {
            name: "Delta",
            value: delta,
            unit: "GHz",
            source: delta_src,
        },
        ConstantUsed {
            name: "C_J",
            value: c_j,
            unit: "fF",
            source: c_j_src,
        },
        ConstantUsed {
            name: "f_ref",
            value: super::REFERENCE_FREQUENCY_GHZ,
            unit: "GHz",
            source: Source::Default,
        },
        ConstantUsed {
            name: "h",
            value: H,
            unit: "J s",
            source: Source::Exact,
        },
        ConstantUsed {
            name: "hbar",
            value: HBAR,
            unit: "J s",
            source: Source::Exact,
        },
        ConstantUsed {
            name: "e",
            value: E_CHARGE,
            unit: "C",
            source: Source::Exact,
        },
        ConstantUsed {
            name: "k_B",
            value: K_B,
            unit: "J/K",
            source: Source::Exact,
        },
        ConstantUsed {
            name: "Phi0",
            value: PHI0,
            unit: "Wb",
            source: Source::Exact,
        },
    ];
    Ok(CoherenceBudget {
        params: *params,
        flux,
        f01,
        phi01,
        slope,
        curvature,
        chi01,
        relaxation,
        dephasing,
        t1_us: lifetime_us(gamma1),
        t2_us: lifetime_us(0.5 * gamma1 + gamma_phi),
        constants,
    })
}
