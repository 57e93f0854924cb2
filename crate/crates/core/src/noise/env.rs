use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TEMPERATURE_MK: f64 = 20.0;
pub const DEFAULT_EPS: f64 = 0.15;
/// Aluminium gap, 180 ueV.
pub const DEFAULT_DELTA_GHZ: f64 = 44.0;
pub const SPECIFIC_JUNCTION_CAPACITANCE_FF_PER_UM2: f64 = 45.0;
pub const CHAIN_JUNCTION_AREA_UM2: f64 = 0.8;

/// Noise-channel parameters. An absent loss parameter disables its channel;
/// absent T, eps, Delta and C_J fall back to documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentParams {
    #[serde(rename = "T_mK", default, skip_serializing_if = "Option::is_none")]
    pub temperature_mk: Option<f64>,
    /// 1/f flux-noise amplitude at 1 Hz, Phi0/sqrt(Hz).
    #[serde(rename = "A_phi0_per_rtHz", default, skip_serializing_if = "Option::is_none")]
    pub flux_noise: Option<f64>,
    /// Capacitive loss tangent referred to 6 GHz.
    #[serde(rename = "tan_delta_C_6GHz", default, skip_serializing_if = "Option::is_none")]
    pub tan_delta_c: Option<f64>,
    #[serde(rename = "eps", default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(rename = "tan_delta_L", default, skip_serializing_if = "Option::is_none")]
    pub tan_delta_l: Option<f64>,
    #[serde(rename = "tan_delta_AlOx", default, skip_serializing_if = "Option::is_none")]
    pub tan_delta_alox: Option<f64>,
    #[serde(rename = "x_qp", default, skip_serializing_if = "Option::is_none")]
    pub x_qp: Option<f64>,
    #[serde(rename = "Delta_GHz", default, skip_serializing_if = "Option::is_none")]
    pub delta_ghz: Option<f64>,
    #[serde(rename = "C_J_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_j_ff: Option<f64>,
    #[serde(rename = "C_g_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_g_ff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Input,
    Default,
    /// Exact by definition of the SI units.
    Exact,
}

impl EnvironmentParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("T_mK", self.temperature_mk),
            ("A_phi0_per_rtHz", self.flux_noise),
            ("tan_delta_C_6GHz", self.tan_delta_c),
            ("eps", self.eps),
            ("tan_delta_L", self.tan_delta_l),
            ("tan_delta_AlOx", self.tan_delta_alox),
            ("x_qp", self.x_qp),
            ("Delta_GHz", self.delta_ghz),
            ("C_J_fF", self.c_j_ff),
            ("C_g_fF", self.c_g_ff),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
                }
            }
        }
        if let Some(eps) = self.eps {
            if eps > 1.0 {
                return Err(Error::invalid(format!("eps must lie in [0, 1], got {eps}")));
            }
        }
        if self.delta_ghz == Some(0.0) {
            return Err(Error::invalid("Delta_GHz must be positive"));
        }
        Ok(())
    }

    fn or_default(v: Option<f64>, default: f64) -> (f64, Source) {
        match v {
            Some(v) => (v, Source::Input),
            None => (default, Source::Default),
        }
    }

    pub fn temperature(&self) -> (f64, Source) {
        Self::or_default(self.temperature_mk, DEFAULT_TEMPERATURE_MK)
    }

    pub fn eps(&self) -> (f64, Source) {
        Self::or_default(self.eps, DEFAULT_EPS)
    }

    pub fn delta(&self) -> (f64, Source) {
        Self::or_default(self.delta_ghz, DEFAULT_DELTA_GHZ)
    }

    /// Chain-junction capacitance; default 45 fF/um^2 x 0.8 um^2 = 36 fF.
    pub fn junction_capacitance(&self) -> (f64, Source) {
        Self::or_default(
            self.c_j_ff,
            SPECIFIC_JUNCTION_CAPACITANCE_FF_PER_UM2 * CHAIN_JUNCTION_AREA_UM2,
        )
    }
}
