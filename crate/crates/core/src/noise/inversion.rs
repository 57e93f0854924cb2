use std::str::FromStr;

use serde::Serialize;

use super::channels::{dielectric_rate, junction_oxide_rate, quasiparticle_rate, REFERENCE_FREQUENCY_GHZ};
use super::env::{EnvironmentParams, Source};
use crate::error::{Error, Result};
use crate::spectrum::{CircuitParams, TransitionTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossChannel {
    Dielectric,
    Quasiparticle,
    JunctionOxide,
}

impl FromStr for LossChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dielectric" => Ok(LossChannel::Dielectric),
            "quasiparticle" => Ok(LossChannel::Quasiparticle),
            "junction_oxide" => Ok(LossChannel::JunctionOxide),
            other => Err(Error::invalid(format!(
                "unknown loss channel {other:?} (dielectric, quasiparticle, junction_oxide)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossInversion {
    pub channel: LossChannel,
    /// tan delta_C or tan delta_AlOx at the qubit frequency, or x_qp.
    pub value: f64,
    /// Dielectric only: the same loss referred to 6 GHz through the eps law.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_at_6ghz: Option<f64>,
    #[serde(rename = "T1_us")]
    pub t1_us: f64,
    #[serde(rename = "f01_GHz")]
    pub f01: f64,
    pub phi01: f64,
    #[serde(rename = "T_mK")]
    pub temperature: (f64, Source),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<(f64, Source)>,
    #[serde(rename = "Delta_GHz", skip_serializing_if = "Option::is_none")]
    pub delta: Option<(f64, Source)>,
    #[serde(rename = "C_J_fF", skip_serializing_if = "Option::is_none")]
    pub c_j: Option<(f64, Source)>,
}

/// Loss parameter that alone would produce the measured T1. Every channel is
/// linear in its parameter, so the solve is a division by the unit-loss rate.
pub fn invert_loss(
    channel: LossChannel,
    t1_us: f64,
    trans: &TransitionTable,
    env: &EnvironmentParams,
    params: &CircuitParams,
) -> Result<LossInversion> {
    if !(t1_us > 0.0 && t1_us.is_finite()) {
        return Err(Error::invalid(format!("T1 must be positive, got {t1_us}")));
    }
    env.validate()?;
    params.validate()?;
    let t01 = trans
        .get(0, 1)
        .ok_or_else(|| Error::invalid("transition table lacks 0-1"))?;
    let (f01, phi01) = (t01.f_ij, t01.phi_ij);
    let temperature = env.temperature();
    let t_mk = temperature.0;
    let mut out = LossInversion {
        channel,
        value: 0.0,
        value_at_6ghz: None,
        t1_us,
        f01,
        phi01,
        temperature,
        eps: None,
        delta: None,
        c_j: None,
    };
    let unit_rate = match channel {
        LossChannel::Dielectric => dielectric_rate(f01, phi01, params.e_c, 1.0, t_mk)?,
        LossChannel::Quasiparticle => {
            out.delta = Some(env.delta());
            quasiparticle_rate(f01, phi01, params.e_l, 1.0, env.delta().0)?
        }
        LossChannel::JunctionOxide => {
            out.c_j = Some(env.junction_capacitance());
            junction_oxide_rate(f01, phi01, params, 1.0, env.junction_capacitance().0, t_mk)?
        }
    };
    if !(unit_rate > 0.0 && unit_rate.is_finite()) {
        return Err(Error::Inversion {
            channel: format!("{channel:?}"),
            reason: format!("rate per unit loss is {unit_rate}; parameter is not identifiable"),
        });
    }
    out.value = 1e6 / t1_us / unit_rate;
    if channel == LossChannel::Dielectric {
        let eps = env.eps();
        out.value_at_6ghz = Some(out.value / (f01 / REFERENCE_FREQUENCY_GHZ).powf(eps.0));
        out.eps = Some(eps);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::channels::tan_delta_at;
    use crate::spectrum::{spectrum, transitions, BasisConfig, FluxBias};

    fn device_a() -> (CircuitParams, TransitionTable) {
        let p = CircuitParams::new(3.0, 0.84, 1.0, 100).unwrap();
        let s = spectrum(&p, FluxBias::SWEET_SPOT, 3, &BasisConfig::default()).unwrap();
        (p, transitions(&s).unwrap())
    }

    #[test]
    fn device_a_columns() {
        let (p, t) = device_a();
        let env = EnvironmentParams::default();
        let tan = invert_loss(LossChannel::Dielectric, 110.0, &t, &env, &p).unwrap();
        assert!((tan.value / 1.7e-6 - 1.0).abs() < 0.4, "{}", tan.value);
        let alox = invert_loss(LossChannel::JunctionOxide, 110.0, &t, &env, &p).unwrap();
        assert!((alox.value / 1.1e-4 - 1.0).abs() < 0.4, "{}", alox.value);
        assert!(tan.value_at_6ghz.unwrap() > tan.value);
    }

    #[test]
    fn inverse_of_forward_is_identity() {
        let (p, t) = device_a();
        let (f01, phi01) = (t.f01(), t.get(0, 1).unwrap().phi_ij);
        let env = EnvironmentParams {
            temperature_mk: Some(35.0),
            eps: Some(0.3),
            ..Default::default()
        };
        let tan6 = 2.3e-6;
        let rate = dielectric_rate(f01, phi01, p.e_c, tan_delta_at(f01, tan6, 0.3), 35.0).unwrap();
        let inv = invert_loss(LossChannel::Dielectric, 1e6 / rate, &t, &env, &p).unwrap();
        assert!((inv.value_at_6ghz.unwrap() / tan6 - 1.0).abs() < 1e-10);

        let x = 4.2e-8;
        let rate = quasiparticle_rate(f01, phi01, p.e_l, x, 44.0).unwrap();
        let inv = invert_loss(LossChannel::Quasiparticle, 1e6 / rate, &t, &env, &p).unwrap();
        assert!((inv.value / x - 1.0).abs() < 1e-10);

        let tan = 7e-5;
        let rate = junction_oxide_rate(f01, phi01, &p, tan, 36.0, 35.0).unwrap();
        let inv = invert_loss(LossChannel::JunctionOxide, 1e6 / rate, &t, &env, &p).unwrap();
        assert!((inv.value / tan - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rates_increase_with_loss() {
        let (p, t) = device_a();
        let (f01, phi01) = (t.f01(), t.get(0, 1).unwrap().phi_ij);
        let mut last = 0.0;
        for k in 1..6 {
            let r = dielectric_rate(f01, phi01, p.e_c, k as f64 * 1e-6, 20.0).unwrap();
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn rejects_bad_lifetime_and_channel() {
        let (p, t) = device_a();
        assert!(invert_loss(LossChannel::Dielectric, 0.0, &t, &EnvironmentParams::default(), &p).is_err());
        assert!("inductive".parse::<LossChannel>().is_err());
        assert_eq!(
            "junction_oxide".parse::<LossChannel>().unwrap(),
            LossChannel::JunctionOxide
        );
    }
}
