use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use fluxsim::cqed::{coupled_spectrum, coupling_strength, dispersive_shift, spin_projection, TwoQubitCoupling};
use fluxsim::fit::{fit, synth_dataset, FitInit, FitOptions, FluxCalibration, SpectroscopyDataset, TransitionLabel};
use fluxsim::format::{round_json, sig};
use fluxsim::noise::{budget, invert_loss, CavityInputs, LossChannel};
use fluxsim::registry::DeviceRegistry;
use fluxsim::reproduce::{table1, write_table_csv};
use fluxsim::spectrum::{flux_sweep, spectrum, transitions, BasisConfig, CircuitParams, FluxBias};
use fluxsim::{Error, Result};
use serde_json::{json, Value};

use crate::args::*;
use crate::inputs;

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                Error::invalid(format!("cannot create {}: {e}", path.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &Option<PathBuf>, value: Value) -> Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, &round_json(value))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn params_json(p: &CircuitParams) -> Value {
    serde_json::to_value(p).expect("plain struct")
}

pub fn spectrum_cmd(a: &SpectrumArgs) -> Result<()> {
    let dev = inputs::device(&a.device)?;
    let basis = inputs::basis(&a.basis)?;
    if a.steps == 0 {
        return Err(Error::invalid("--steps must be at least 1"));
    }
    let grid: Vec<FluxBias> = (0..a.steps)
        .map(|k| {
            let t = if a.steps == 1 {
                0.0
            } else {
                k as f64 / (a.steps - 1) as f64
            };
            FluxBias(a.from + (a.to - a.from) * t)
        })
        .collect();
    let levels = if a.all_pairs { a.levels } else { a.levels.max(2) };
    let sweep = flux_sweep(&dev.params, &grid, levels, &basis)?;
    let mut w = open_out(&a.out.out)?;
    writeln!(w, "flux_phi0,level_i,level_j,f_ij_GHz,phi_ij,n_ij")?;
    for (flux, table) in &sweep {
        for t in &table.entries {
            if !a.all_pairs && (t.i, t.j) != (0, 1) {
                continue;
            }
            writeln!(
                w,
                "{},{},{},{},{},{}",
                sig(flux.0),
                t.i,
                t.j,
                sig(t.f_ij),
                sig(t.phi_ij),
                sig(t.n_ij)
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn budget_cmd(a: &BudgetArgs) -> Result<()> {
    let dev = inputs::device(&a.device)?;
    let basis = inputs::basis(&a.basis)?;
    let env = inputs::environment(&a.env, dev.device.as_ref())?;
    let flux = FluxBias::new(a.flux)?;
    let cavity = match a.n_th {
        Some(n_th) => {
            let cavity = inputs::cavity(&a.cavity, dev.device.as_ref())?
                .ok_or_else(|| Error::invalid("--n-th needs a cavity (--cavity, --g or a registry device)"))?;
            Some(CavityInputs { cavity, n_th })
        }
        None => None,
    };
    let b = budget(&dev.params, flux, &env, cavity.as_ref(), &basis)?;
    let mut v = serde_json::to_value(&b)?;
    v["environment"] = serde_json::to_value(&env)?;
    v["warnings"] = json!(dev.params.regime_warnings());
    write_json(&a.out.out, v)
}

pub fn invert_cmd(a: &InvertArgs) -> Result<()> {
    let dev = inputs::device(&a.device)?;
    let basis = inputs::basis(&a.basis)?;
    let env = inputs::environment(&a.env, dev.device.as_ref())?;
    let t1 = a
        .t1_us
        .or_else(|| dev.device.as_ref().and_then(|d| d.reference.t1_us))
        .ok_or_else(|| Error::invalid("no T1: pass --t1-us or a registry device with a quoted T1"))?;
    let spec = spectrum(&dev.params, FluxBias::new(a.flux)?, 2, &basis)?;
    let trans = transitions(&spec)?;
    let channels = match a.channel {
        ChannelArg::Dielectric => vec![LossChannel::Dielectric],
        ChannelArg::Quasiparticle => vec![LossChannel::Quasiparticle],
        ChannelArg::JunctionOxide => vec![LossChannel::JunctionOxide],
        ChannelArg::All => vec![
            LossChannel::Dielectric,
            LossChannel::Quasiparticle,
            LossChannel::JunctionOxide,
        ],
    };
    let results = channels
        .into_iter()
        .map(|c| invert_loss(c, t1, &trans, &env, &dev.params))
        .collect::<Result<Vec<_>>>()?;
    let v = json!({
        "device": dev.device.as_ref().map(|d| d.name.clone()),
        "params": params_json(&dev.params),
        "flux_phi0": a.flux,
        "T1_us": t1,
        "inversions": serde_json::to_value(&results)?,
    });
    write_json(&a.out.out, v)
}

pub fn table1_cmd(a: &Table1Args) -> Result<()> {
    let registry = DeviceRegistry::load()?;
    let basis = BasisConfig::with_dim(a.dim);
    basis.validate()?;
    let rows = table1(&registry, &basis)?;
    let w = open_out(&a.out.out)?;
    write_table_csv(&rows, w)
}

pub fn fit_cmd(a: &FitArgs) -> Result<()> {
    let dev = inputs::device(&a.device)?;
    let basis = inputs::basis(&a.basis)?;
    let file = File::open(&a.data).map_err(|e| Error::invalid(format!("cannot read {}: {e}", a.data.display())))?;
    let data = SpectroscopyDataset::read_csv(file)?;
    let mut options = match a.method {
        MethodArg::Lm => FitOptions::default(),
        MethodArg::Simplex => FitOptions::simplex(),
    };
    options.basis = basis;
    options.f_readout = a.f_readout;
    if let Some(n) = a.max_iter {
        options.max_iterations = n;
    }
    let init = FitInit {
        params: dev.params,
        calib: FluxCalibration {
            offset: a.offset,
            scale: a.scale,
        },
    };
    let result = fit(&data, &init, &options)?;
    write_json(&a.out.out, serde_json::to_value(&result)?)
}

pub fn synth_cmd(a: &SynthArgs) -> Result<()> {
    let dev = inputs::device(&a.device)?;
    let basis = inputs::basis(&a.basis)?;
    if a.points < 1 {
        return Err(Error::invalid("--points must be at least 1"));
    }
    let grid: Vec<f64> = (0..a.points)
        .map(|k| {
            let t = if a.points == 1 {
                0.0
            } else {
                k as f64 / (a.points - 1) as f64
            };
            a.bias_from + (a.bias_to - a.bias_from) * t
        })
        .collect();
    let labels = a
        .labels
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<TransitionLabel>>>()?;
    let calib = FluxCalibration {
        offset: a.offset,
        scale: a.scale,
    };
    let data = synth_dataset(
        &dev.params,
        &calib,
        &grid,
        &labels,
        a.noise,
        a.seed,
        a.f_readout,
        &basis,
    )?;
    let w = open_out(&a.out.out)?;
    data.write_csv(w)
}

fn one_device(name: &Option<String>, path: &Option<PathBuf>, which: &str) -> Result<CircuitParams> {
    let p = match (name, path) {
        (_, Some(path)) => inputs::read_json::<CircuitParams>(path)?,
        (Some(name), None) => inputs::lookup(name)?.params,
        (None, None) => {
            return Err(Error::invalid(format!(
                "qubit {which}: use --device-{which} or --params-{which}"
            )))
        }
    };
    p.validate()?;
    Ok(p)
}

pub fn couple_cmd(a: &CoupleArgs) -> Result<()> {
    let basis = inputs::basis(&a.basis)?;
    let pa = one_device(&a.device_a, &a.params_a, "a")?;
    let pb = one_device(&a.device_b, &a.params_b, "b")?;
    let coupling = match (&a.coupling, a.m, a.c_m_over_c) {
        (Some(path), None, None) => inputs::read_json::<TwoQubitCoupling>(path)?,
        (None, Some(m), None) => TwoQubitCoupling::inductive(m),
        (None, None, Some(c)) => TwoQubitCoupling::capacitive(c),
        (None, None, None) => return Err(Error::invalid("no coupling: use --coupling, --m or --c-m-over-c")),
        _ => return Err(Error::invalid("give the coupling either as a file or as one flag")),
    };
    let j = coupling_strength(&pa, &pb, &coupling)?;
    let sweet = FluxBias::SWEET_SPOT;
    let sa = spectrum(&pa, sweet, a.n_keep, &basis)?;
    let sb = spectrum(&pb, sweet, a.n_keep, &basis)?;
    let ta = transitions(&sa)?;
    let tb = transitions(&sb)?;
    let spin = spin_projection(
        &sa,
        &sb,
        &ta,
        &tb,
        &coupling,
        FluxBias::new(a.flux_a)?,
        FluxBias::new(a.flux_b)?,
    )?;
    let (ba, bb) = if a.flux_a == 0.5 && a.flux_b == 0.5 {
        (sa, sb)
    } else {
        (
            spectrum(&pa, FluxBias::new(a.flux_a)?, a.n_keep, &basis)?,
            spectrum(&pb, FluxBias::new(a.flux_b)?, a.n_keep, &basis)?,
        )
    };
    let joint = coupled_spectrum(&ba, &bb, &coupling, a.n_keep)?;
    let shown = joint.energies.len().min(8);
    let levels: Vec<Value> = (0..shown)
        .map(|k| {
            json!({
                "energy_GHz": joint.energies[k] - joint.energies[0],
                "label": format!("{}{}", joint.labels[k].0, joint.labels[k].1),
                "ambiguous": joint.ambiguous[k],
            })
        })
        .collect();
    let v = json!({
        "params_a": params_json(&pa),
        "params_b": params_json(&pb),
        "coupling": serde_json::to_value(coupling)?,
        "J_GHz": j,
        "spin_model": serde_json::to_value(spin.model)?,
        "ZZ_GHz": joint.zz(),
        "levels": levels,
        "warnings": spin.warnings,
    });
    write_json(&a.out.out, v)
}

pub fn chi_cmd(a: &ChiArgs) -> Result<()> {
    let dev = inputs::device(&a.device)?;
    let basis = inputs::basis(&a.basis)?;
    let cavity = inputs::cavity(&a.cavity, dev.device.as_ref())?
        .ok_or_else(|| Error::invalid("no cavity: use --cavity, --g or a registry device"))?;
    let spec = spectrum(&dev.params, FluxBias::new(a.flux)?, a.levels, &basis)?;
    let trans = transitions(&spec)?;
    let shift = dispersive_shift(&trans, &cavity, a.levels)?;
    let v = json!({
        "params": params_json(&dev.params),
        "flux_phi0": a.flux,
        "cavity": serde_json::to_value(cavity)?,
        "levels": a.levels,
        "chi0_MHz": shift.chi0,
        "chi1_MHz": shift.chi1,
        "chi01_MHz": shift.chi01,
        "convention": "chi01 = chi1 - chi0; positive chi_i pulls the cavity down",
    });
    write_json(&a.out.out, v)
}
