//! Named devices: the eight measured fluxonia ship bundled, and a JSON file
//! named by `FLUXSIM_REGISTRY` replaces them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cqed::CavityParams;
use crate::error::{Error, Result};
use crate::noise::EnvironmentParams;
use crate::spectrum::CircuitParams;

pub const REGISTRY_ENV_VAR: &str = "FLUXSIM_REGISTRY";

const BUNDLED: &str = include_str!("../data/devices.json");

/// Measured and inferred values quoted for a device, for comparison only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    #[serde(rename = "T1_us")]
    pub t1_us: Option<f64>,
    #[serde(rename = "T2_us")]
    pub t2_us: Option<f64>,
    #[serde(rename = "f01_GHz")]
    pub f01: Option<f64>,
    pub omega12_over_omega01: Option<f64>,
    #[serde(rename = "chi01_MHz")]
    pub chi01: Option<f64>,
    #[serde(rename = "tan_delta_C")]
    pub tan_delta_c: Option<f64>,
    #[serde(rename = "tan_delta_AlOx")]
    pub tan_delta_alox: Option<f64>,
    pub x_qp: Option<f64>,
    #[serde(rename = "tan_delta_L")]
    pub tan_delta_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub name: String,
    pub params: CircuitParams,
    #[serde(default)]
    pub env: Option<EnvironmentParams>,
    #[serde(default)]
    pub cavity: Option<CavityParams>,
    #[serde(default)]
    pub reference: ReferenceValues,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    devices: Vec<Device>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceRegistry {
    devices: BTreeMap<String, Device>,
}

impl DeviceRegistry {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: RegistryFile = serde_json::from_str(text)?;
        let mut devices = BTreeMap::new();
        for d in file.devices {
            d.params.validate()?;
            if let Some(env) = &d.env {
                env.validate()?;
            }
            if let Some(c) = &d.cavity {
                c.validate()?;
            }
            let name = d.name.clone();
            if devices.insert(name.clone(), d).is_some() {
                return Err(Error::invalid(format!("duplicate device name {name:?} in registry")));
            }
        }
        Ok(DeviceRegistry { devices })
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled registry is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The file named by `FLUXSIM_REGISTRY` if set, else the bundled devices.
    pub fn load() -> Result<Self> {
        match std::env::var_os(REGISTRY_ENV_VAR) {
            Some(path) if !path.is_empty() => Self::from_path(Path::new(&path)),
            _ => Ok(Self::bundled()),
        }
    }

    pub fn get(&self, name: &str) -> Result<&Device> {
        self.devices.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.devices.keys().map(String::as_str).collect();
            Error::invalid(format!("unknown device {name:?} (known: {})", known.join(", ")))
        })
    }

    /// Devices in name order.
    pub fn devices(&self) -> impl Iterator<Item = &Device> {
        self.devices.values()
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_devices() {
        let r = DeviceRegistry::bundled();
        assert_eq!(r.len(), 8);
        let names: Vec<&str> = r.devices().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["A", "B", "C", "D", "E", "F", "G", "H"]);
        let h = r.get("H").unwrap();
        assert_eq!(
            (h.params.e_j, h.params.e_c, h.params.e_l, h.params.n_junctions),
            (4.43, 1.0, 0.79, 100)
        );
        assert_eq!(h.cavity.unwrap().g, 40.0);
        assert_eq!(r.get("A").unwrap().reference.tan_delta_l, Some(15.4e-8));
        assert!(r.get("Z").is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        let one = r#"{"name":"X","params":{"E_J_GHz":3,"E_C_GHz":1,"E_L_GHz":1,"N":10}}"#;
        let text = format!(r#"{{"devices":[{one},{one}]}}"#);
        assert!(DeviceRegistry::from_json(&text).is_err());
        let text = format!(r#"{{"devices":[{one}]}}"#);
        assert_eq!(DeviceRegistry::from_json(&text).unwrap().len(), 1);
    }
}
