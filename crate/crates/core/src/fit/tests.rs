use std::time::Instant;

use super::{fit, synth_dataset, FitInit, FitOptions, FluxCalibration, SpectroscopyDataset, TransitionLabel};
use crate::spectrum::{BasisConfig, CircuitParams};
use crate::Error;

fn truth() -> (CircuitParams, FluxCalibration) {
    (
        CircuitParams::new(3.0, 0.84, 1.0, 100).unwrap(),
        FluxCalibration {
            offset: 0.02,
            scale: 0.48,
        },
    )
}

fn labels(names: &[&str]) -> Vec<TransitionLabel> {
    names.iter().map(|s| s.parse().unwrap()).collect()
}

fn dataset(sigma: f64, seed: u64) -> SpectroscopyDataset {
    let (p, c) = truth();
    let grid: Vec<f64> = (0..20).map(|k| k as f64 / 19.0).collect();
    synth_dataset(
        &p,
        &c,
        &grid,
        &labels(&["01", "12"]),
        sigma,
        seed,
        7.5,
        &BasisConfig::default(),
    )
    .unwrap()
}

fn perturbed(factor: [f64; 5]) -> FitInit {
    let (p, c) = truth();
    FitInit {
        params: CircuitParams::new(p.e_j * factor[0], p.e_c * factor[1], p.e_l * factor[2], 100).unwrap(),
        calib: FluxCalibration {
            offset: c.offset * factor[3],
            scale: c.scale * factor[4],
        },
    }
}

#[test]
fn round_trip_recovers_truth() {
    let data = dataset(1e-3, 11);
    let start = Instant::now();
    let r = fit(&data, &perturbed([1.2, 0.8, 1.2, 0.8, 1.2]), &FitOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (p, c) = truth();
    let want = [p.e_j, p.e_c, p.e_l, c.offset, c.scale];
    for (k, (&got, &w)) in r.values().iter().zip(&want).enumerate() {
        assert!((got / w - 1.0).abs() < 0.01, "param {k}: {got} vs {w}");
        assert!(
            (got - w).abs() < 3.0 * r.std_errors[k],
            "param {k}: {got} vs {w} +- {}",
            r.std_errors[k]
        );
    }
    assert!(r.converged && r.iterations < 200);
    assert!(elapsed < 10.0, "{elapsed} s");
    // zero-mean residuals
    let n = r.residuals.len() as f64;
    let mean = r.residuals.iter().map(|q| q.residual).sum::<f64>() / n;
    assert!(mean.abs() < 2.0 / n.sqrt() * r.residual_rms);
}

#[test]
fn noiseless_data_is_interpolated() {
    let data = dataset(0.0, 0);
    let r = fit(&data, &perturbed([1.1, 0.95, 1.05, 1.1, 0.95]), &FitOptions::default()).unwrap();
    assert!(r.residual_rms < 1e-6, "{}", r.residual_rms);
}

#[test]
fn fit_is_deterministic() {
    let data = dataset(1e-3, 3);
    let init = perturbed([1.1, 0.9, 1.1, 0.9, 1.1]);
    let a = fit(&data, &init, &FitOptions::default()).unwrap();
    let b = fit(&data, &init, &FitOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bias_rescaling_leaves_the_fit_unchanged() {
    let data = dataset(1e-3, 5);
    let init = perturbed([1.1, 0.9, 1.1, 0.9, 1.1]);
    let a = fit(&data, &init, &FitOptions::default()).unwrap();
    let mut scaled = data.clone();
    for p in &mut scaled.points {
        p.bias *= 4.0;
    }
    let mut init4 = init;
    init4.calib.scale /= 4.0;
    let b = fit(&scaled, &init4, &FitOptions::default()).unwrap();
    assert!((a.chi2 / b.chi2 - 1.0).abs() < 1e-6);
    assert!((a.calib.scale / (4.0 * b.calib.scale) - 1.0).abs() < 1e-5);
    assert!((a.params.e_j / b.params.e_j - 1.0).abs() < 1e-5);
}

#[test]
fn single_label_narrow_range_is_singular() {
    let (p, c) = truth();
    let grid: Vec<f64> = (0..12).map(|k| 0.95 + 0.005 * k as f64).collect();
    let data = synth_dataset(&p, &c, &grid, &labels(&["01"]), 0.0, 0, 7.5, &BasisConfig::default()).unwrap();
    let err = fit(&data, &perturbed([1.05, 1.0, 1.0, 1.0, 1.0]), &FitOptions::default()).unwrap_err();
    assert!(matches!(err, Error::SingularJacobian { .. }), "{err}");
}

#[test]
fn simplex_fallback_reaches_the_same_optimum() {
    let data = dataset(1e-3, 11);
    let init = perturbed([1.05, 0.95, 1.05, 0.95, 1.05]);
    let lm = fit(&data, &init, &FitOptions::default()).unwrap();
    let nm = fit(&data, &init, &FitOptions::simplex()).unwrap();
    eprintln!(
        "simplex: {} iterations, gradient {:.3e}",
        nm.iterations, nm.gradient_norm
    );
    for (a, b) in lm.values().iter().zip(nm.values()) {
        assert!((a / b - 1.0).abs() < 1e-3, "{a} vs {b}");
    }
}
