use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fluxsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxsim"))
        .args(args)
        .env_remove("FLUXSIM_REGISTRY")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_sweep_rows_and_endpoint() {
    let o = fluxsim(&["spectrum", "--device", "A"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "flux_phi0,level_i,level_j,f_ij_GHz,phi_ij,n_ij");
    assert_eq!(lines.len(), 102);
    let last: Vec<&str> = lines[101].split(',').collect();
    assert_eq!(last[0], "0.5");
    let f01: f64 = last[3].parse().unwrap();
    assert!((f01 / 0.78 - 1.0).abs() < 0.03, "{f01}");
}

#[test]
fn spectrum_all_pairs() {
    let o = fluxsim(&[
        "spectrum",
        "--device",
        "A",
        "--steps",
        "3",
        "--levels",
        "4",
        "--all-pairs",
    ]);
    assert!(o.status.success());
    // 3 flux points x 6 pairs + header
    assert_eq!(stdout(&o).lines().count(), 19);
}

#[test]
fn flags_override_registry_values() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    fs::write(
        &params,
        r#"{"E_J_GHz": 3.0, "E_C_GHz": 0.84, "E_L_GHz": 1.0, "N": 100}"#,
    )
    .unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["spectrum", "--steps", "1", "--from", "0.5", "--to", "0.5"];
        args.extend_from_slice(extra);
        let o = fluxsim(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o).lines().nth(1).unwrap().to_string()
    };
    let from_device = run(&["--device", "A"]);
    let from_file = run(&["--params", path_str(&params)]);
    assert_eq!(from_device, from_file);
    let overridden = run(&["--device", "A", "--ej", "4.0"]);
    assert_ne!(from_device, overridden);
}

#[test]
fn budget_without_environment_is_unlimited() {
    let o = fluxsim(&["budget", "--device", "A"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["T1_us"], "inf");
    assert_eq!(v["T2_us"], "inf");
}

#[test]
fn budget_with_device_environment_is_finite() {
    let o = fluxsim(&["budget", "--device", "A", "--device-env"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t1 = json(&o)["T1_us"].as_f64().unwrap();
    assert!(t1 > 10.0 && t1 < 1e4, "{t1}");
}

#[test]
fn table1_is_byte_identical_across_runs() {
    let a = fluxsim(&["table1"]);
    let b = fluxsim(&["table1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("device,quantity,unit,computed,reference,rel_deviation\n"));
}

#[test]
fn registry_override_by_environment() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("devices.json");
    fs::write(
        &reg,
        r#"{"devices": [{"name": "Z", "params": {"E_J_GHz": 3.0, "E_C_GHz": 0.84, "E_L_GHz": 1.0, "N": 100},
            "reference": {"f01_GHz": 0.78}}]}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fluxsim"))
        .args(["table1"])
        .env("FLUXSIM_REGISTRY", &reg)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.starts_with("Z,")), "{text}");
    let missing = fluxsim(&["spectrum", "--device", "Z"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn synth_then_fit_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let o = fluxsim(&[
        "synth",
        "--device",
        "A",
        "--offset",
        "0.02",
        "--scale",
        "0.48",
        "--noise",
        "0.001",
        "--seed",
        "5",
        "--out",
        path_str(&data),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fluxsim(&[
        "fit",
        "--data",
        path_str(&data),
        "--ej",
        "3.5",
        "--ec",
        "0.75",
        "--el",
        "1.1",
        "--junctions",
        "100",
        "--offset",
        "0.018",
        "--scale",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["converged"], true);
    let e_j = v["params"]["E_J_GHz"].as_f64().unwrap();
    assert!((e_j / 3.0 - 1.0).abs() < 0.01, "{e_j}");
}

#[test]
fn chi_reports_device_a_shift() {
    let o = fluxsim(&["chi", "--device", "A"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let chi = json(&o)["chi01_MHz"].as_f64().unwrap();
    assert!(chi.abs() > 0.27 / 2.0 && chi.abs() < 0.27 * 2.0, "{chi}");
}

#[test]
fn couple_reports_strength_and_zz() {
    let o = fluxsim(&["couple", "--device-a", "A", "--device-b", "A", "--c-m-over-c", "0.05"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    // 2 E_C C_M/C for identical qubits
    assert!((v["J_GHz"].as_f64().unwrap() - 0.084).abs() < 1e-12);
    assert!(v["ZZ_GHz"].as_f64().unwrap().abs() < 0.01);
}

#[test]
fn couple_rejects_both_strengths() {
    let o = fluxsim(&[
        "couple",
        "--device-a",
        "A",
        "--device-b",
        "A",
        "--c-m-over-c",
        "0.05",
        "--m",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2_with_one_line() {
    let o = fluxsim(&["spectrum", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).trim_end().lines().count(), 1);
}

#[test]
fn unknown_device_exits_2() {
    let o = fluxsim(&["spectrum", "--device", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("fluxsim: "));
}

#[test]
fn malformed_params_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    fs::write(&params, "{ not json").unwrap();
    let o = fluxsim(&["spectrum", "--params", path_str(&params)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_energy_exits_2() {
    let o = fluxsim(&["spectrum", "--device", "A", "--ec", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unconverged_basis_exits_3() {
    let o = fluxsim(&[
        "spectrum", "--device", "G", "--dim", "12", "--levels", "4", "--tol", "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
