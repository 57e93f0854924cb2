//! Derived columns of the device summary table, recomputed from the circuit
//! parameters and set beside the quoted values.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::cqed::dispersive_shift;
use crate::error::Result;
use crate::format::sig;
use crate::noise::{derived_tan_delta_l, flux_dephasing, invert_loss, EnvironmentParams, LossChannel};
use crate::registry::{Device, DeviceRegistry};
use crate::spectrum::{flux_derivative, spectrum, transitions, BasisConfig, DerivativeOrder, FluxBias};

/// Levels kept for dispersive shifts.
pub const CHI_LEVELS: usize = 12;
/// Flux-noise amplitude used for the second-order dephasing column.
pub const FLUX_NOISE_AMPLITUDE: f64 = 2e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub device: String,
    pub quantity: &'static str,
    pub unit: &'static str,
    pub computed: f64,
    pub reference: Option<f64>,
}

impl TableRow {
    pub fn rel_deviation(&self) -> Option<f64> {
        self.reference.map(|p| (self.computed - p) / p)
    }
}

/// Environment used for the inversions: T = 20 mK, Delta = 44 GHz,
/// C_J = 36 fF (defaults), unless the device overrides them.
fn inversion_env(device: &Device) -> EnvironmentParams {
    let mut env = EnvironmentParams::default();
    if let Some(e) = &device.env {
        env.temperature_mk = e.temperature_mk;
        env.delta_ghz = e.delta_ghz;
        env.c_j_ff = e.c_j_ff;
    }
    env
}

pub fn device_rows(device: &Device, basis: &BasisConfig) -> Result<Vec<TableRow>> {
    let p = &device.params;
    let r = &device.reference;
    let sweet = FluxBias::SWEET_SPOT;
    let spec = spectrum(p, sweet, CHI_LEVELS, basis)?;
    let trans = transitions(&spec)?;
    let f01 = trans.f01();
    let phi01 = trans.get(0, 1).expect("levels").phi_ij;
    let mut rows = Vec::new();
    let mut push = |quantity, unit, computed, reference| {
        rows.push(TableRow {
            device: device.name.clone(),
            quantity,
            unit,
            computed,
            reference,
        })
    };
    push("f01", "GHz", f01, r.f01);
    push(
        "omega12_over_omega01",
        "1",
        trans.anharmonicity_ratio().expect("levels"),
        r.omega12_over_omega01,
    );
    push("phi01", "rad", phi01, None);
    if let Some(cav) = &device.cavity {
        let chi = dispersive_shift(&trans, cav, CHI_LEVELS)?;
        push("chi01_abs", "MHz", chi.chi01.abs(), r.chi01);
    }
    if let Some(tan_c) = r.tan_delta_c {
        push("tan_delta_L", "1", derived_tan_delta_l(p, f01, tan_c), r.tan_delta_l);
    }
    if let Some(t1) = r.t1_us {
        let env = inversion_env(device);
        let tan_c = invert_loss(LossChannel::Dielectric, t1, &trans, &env, p)?;
        push("tan_delta_C", "1", tan_c.value, r.tan_delta_c);
        let alox = invert_loss(LossChannel::JunctionOxide, t1, &trans, &env, p)?;
        push("tan_delta_AlOx", "1", alox.value, r.tan_delta_alox);
        let x = invert_loss(LossChannel::Quasiparticle, t1, &trans, &env, p)?;
        push("x_qp", "1", x.value, r.x_qp);
    }
    let curvature = flux_derivative(p, sweet, DerivativeOrder::Second, basis)?;
    let second = flux_dephasing(0.0, curvature, FLUX_NOISE_AMPLITUDE)?.second_order;
    push("T_phi_second_order", "ms", 1e3 / second, None);
    Ok(rows)
}

/// Every bundled (or overriding) device, in name order.
pub fn table1(registry: &DeviceRegistry, basis: &BasisConfig) -> Result<Vec<TableRow>> {
    let devices: Vec<&Device> = registry.devices().collect();
    let per_device: Vec<Vec<TableRow>> = devices
        .par_iter()
        .map(|d| device_rows(d, basis))
        .collect::<Result<_>>()?;
    Ok(per_device.into_iter().flatten().collect())
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["device", "quantity", "unit", "computed", "reference", "rel_deviation"])?;
    for row in rows {
        w.write_record([
            row.device.clone(),
            row.quantity.to_string(),
            row.unit.to_string(),
            sig(row.computed),
            row.reference.map(sig).unwrap_or_default(),
            row.rel_deviation().map(sig).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
