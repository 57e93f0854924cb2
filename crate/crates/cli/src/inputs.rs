//! Resolution of device, environment and cavity inputs:
//! flags > file > registry.

use std::fs;
use std::path::Path;

use fluxsim::cqed::{CavityParams, CouplingKind};
use fluxsim::noise::EnvironmentParams;
use fluxsim::registry::{Device, DeviceRegistry};
use fluxsim::spectrum::{BasisConfig, CircuitParams};
use fluxsim::{Error, Result};
use serde::de::DeserializeOwned;

use crate::args::{BasisArgs, CavityArgs, DeviceArgs, EnvArgs, KindArg};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub struct Resolved {
    pub params: CircuitParams,
    pub device: Option<Device>,
}

pub fn lookup(name: &str) -> Result<Device> {
    Ok(DeviceRegistry::load()?.get(name)?.clone())
}

pub fn device(args: &DeviceArgs) -> Result<Resolved> {
    let device = args.device.as_deref().map(lookup).transpose()?;
    let mut params = match (&args.params, &device) {
        (Some(path), _) => Some(read_json::<CircuitParams>(path)?),
        (None, Some(d)) => Some(d.params),
        (None, None) => None,
    };
    if params.is_none() {
        // all four flags together also define a device
        if let (Some(e_j), Some(e_c), Some(e_l)) = (args.e_j, args.e_c, args.e_l) {
            params = Some(CircuitParams {
                e_j,
                e_c,
                e_l,
                n_junctions: args.n_junctions.unwrap_or(1),
            });
        }
    }
    let mut params =
        params.ok_or_else(|| Error::invalid("no device given: use --device, --params, or --ej/--ec/--el"))?;
    if let Some(v) = args.e_j {
        params.e_j = v;
    }
    if let Some(v) = args.e_c {
        params.e_c = v;
    }
    if let Some(v) = args.e_l {
        params.e_l = v;
    }
    if let Some(v) = args.n_junctions {
        params.n_junctions = v;
    }
    params.validate()?;
    Ok(Resolved { params, device })
}

pub fn basis(args: &BasisArgs) -> Result<BasisConfig> {
    let b = BasisConfig {
        dim: args.dim,
        tol: args.tol,
    };
    b.validate()?;
    Ok(b)
}

pub fn environment(args: &EnvArgs, device: Option<&Device>) -> Result<EnvironmentParams> {
    let mut env = EnvironmentParams::default();
    if args.device_env {
        let d = device.ok_or_else(|| Error::invalid("--device-env needs --device"))?;
        env = d.env.clone().unwrap_or_default();
    }
    if let Some(path) = &args.env {
        let file: EnvironmentParams = read_json(path)?;
        let merge = |slot: &mut Option<f64>, v: Option<f64>| {
            if v.is_some() {
                *slot = v;
            }
        };
        merge(&mut env.temperature_mk, file.temperature_mk);
        merge(&mut env.flux_noise, file.flux_noise);
        merge(&mut env.tan_delta_c, file.tan_delta_c);
        merge(&mut env.eps, file.eps);
        merge(&mut env.tan_delta_l, file.tan_delta_l);
        merge(&mut env.tan_delta_alox, file.tan_delta_alox);
        merge(&mut env.x_qp, file.x_qp);
        merge(&mut env.delta_ghz, file.delta_ghz);
        merge(&mut env.c_j_ff, file.c_j_ff);
        merge(&mut env.c_g_ff, file.c_g_ff);
    }
    let flags = [
        (&mut env.temperature_mk, args.temperature_mk),
        (&mut env.flux_noise, args.flux_noise),
        (&mut env.tan_delta_c, args.tan_delta_c),
        (&mut env.eps, args.eps),
        (&mut env.tan_delta_l, args.tan_delta_l),
        (&mut env.tan_delta_alox, args.tan_delta_alox),
        (&mut env.x_qp, args.x_qp),
        (&mut env.delta_ghz, args.delta_ghz),
        (&mut env.c_j_ff, args.c_j_ff),
        (&mut env.c_g_ff, args.c_g_ff),
    ];
    for (slot, v) in flags {
        if v.is_some() {
            *slot = v;
        }
    }
    env.validate()?;
    Ok(env)
}

/// `None` when neither the registry, a file nor the flags describe a cavity.
pub fn cavity(args: &CavityArgs, device: Option<&Device>) -> Result<Option<CavityParams>> {
    let mut cavity = device.and_then(|d| d.cavity);
    if let Some(path) = &args.cavity {
        cavity = Some(read_json(path)?);
    }
    let any_flag = args.f_r.is_some() || args.kappa.is_some() || args.g.is_some() || args.kind.is_some();
    if cavity.is_none() && any_flag {
        cavity = Some(CavityParams {
            f_r: args.f_r.unwrap_or(7.5),
            kappa: args.kappa.unwrap_or(15.0),
            g: args
                .g
                .ok_or_else(|| Error::invalid("--g is required without a cavity file"))?,
            coupling_kind: CouplingKind::Capacitive,
        });
    }
    if let Some(c) = cavity.as_mut() {
        if let Some(v) = args.f_r {
            c.f_r = v;
        }
        if let Some(v) = args.kappa {
            c.kappa = v;
        }
        if let Some(v) = args.g {
            c.g = v;
        }
        if let Some(k) = args.kind {
            c.coupling_kind = match k {
                KindArg::Capacitive => CouplingKind::Capacitive,
                KindArg::Inductive => CouplingKind::Inductive,
            };
        }
        c.validate()?;
    }
    Ok(cavity)
}
