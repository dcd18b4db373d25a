use std::path::Path;
use std::process::{Command, Output};

fn ibr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibr"))
        .args(args)
        .current_dir(dir)
        .env_remove("IBR_OUT_ROOT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SHORT_RUN: &str = "\
actuator = \"cpam\"

[spec]
mesh_size_beam = 16.0
mesh_size_actuator = 6.0
actuator_pressure = 20.0

[solver]
total_time = 0.004
frame_count = 2
threads = 1
";

#[test]
fn negative_pressure_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ibr(&["simulate", "--actuator", "cpam", "--pressure", "-5"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_actuator_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ibr(&["simulate", "--actuator", "xpam", "--pressure", "10"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_sweep_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ibr(&["sweep", "--actuator", "cpam", "--pressures", ""], dir.path()).status.code(), Some(2));
    assert_eq!(ibr(&["sweep", "--actuator", "cpam"], dir.path()).status.code(), Some(2));
}

#[test]
fn fit_nh_recovers_c10() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("strain,stress_MPa\n");
    for i in 0..=50 {
        let e = 0.01 * i as f64;
        let l = 1.0 + e;
        csv.push_str(&format!("{e},{}\n", 2.0 * 50.3 * (l - 1.0 / (l * l))));
    }
    std::fs::write(dir.path().join("nh.csv"), csv).unwrap();
    let o = ibr(&["material", "fit-nh", "nh.csv"], dir.path());
    assert!(o.status.success());
    let c10: f64 = stdout(&o).split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((c10 - 50.3).abs() < 0.1, "{c10}");
}

#[test]
fn modulus_of_linear_data() {
    let dir = tempfile::tempdir().unwrap();
    let csv: String = std::iter::once("strain,stress_MPa\n".to_string())
        .chain((0..=20).map(|i| format!("{},{}\n", 0.001 * i as f64, 215.0 * 0.001 * i as f64)))
        .collect();
    std::fs::write(dir.path().join("lin.csv"), csv).unwrap();
    let o = ibr(&["material", "modulus", "lin.csv"], dir.path());
    assert!(o.status.success());
    let e: f64 = stdout(&o).split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((e - 215.0).abs() < 1e-9);
}

#[test]
fn shear_of_origin_only_file_is_single_point() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bias.csv"), "displacement_mm,force_N\n0,0\n").unwrap();
    let o = ibr(&["material", "shear", "bias.csv", "--out", "curve.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn malformed_material_csv_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "strain,stress_MPa\n0,0\n0.1,abc\n").unwrap();
    let o = ibr(&["material", "fit-nh", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("stress_MPa"), "{err}");
}

#[test]
fn simulate_writes_outputs_and_manifest_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT_RUN).unwrap();
    let o = ibr(&["simulate", "--config", "short.toml", "--out", "a"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("cpam_20kPa: d_max ="));
    let run = dir.path().join("a/cpam_20kPa");
    for f in ["cpam_20kPa_001.vtk", "cpam_20kPa_002.vtk", "cpam_20kPa_summary.csv", "cpam_20kPa_report.txt", "manifest.toml"] {
        assert!(run.join(f).exists(), "{f}");
    }
    let manifest = std::fs::read_to_string(run.join("manifest.toml")).unwrap();
    assert!(manifest.contains("status = \"ok\""));

    let o = ibr(&["simulate", "--config", "a/cpam_20kPa/manifest.toml", "--out", "b", "--threads", "2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read(run.join("cpam_20kPa_summary.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/cpam_20kPa/cpam_20kPa_summary.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT_RUN).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ibr"))
        .args(["simulate", "--config", "short.toml"])
        .current_dir(dir.path())
        .env("IBR_OUT_ROOT", "envroot")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("envroot/cpam_20kPa/manifest.toml").exists());
}

#[test]
fn pressure_sweep_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT_RUN).unwrap();
    let o = ibr(&["sweep", "--config", "short.toml", "--pressures", "11,13", "--out", "s"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("s/sweep_cpam_pressure_kPa.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "pressure_kPa,d_max_mm,d_tip_mm,accuracy,quasistatic,energy_residual,status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("11,") && lines[2].starts_with("13,"));
    assert!(dir.path().join("s/cpam_11kPa/manifest.toml").exists());
}

#[test]
fn accuracy_printed_with_measurements() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT_RUN).unwrap();
    let mut exp = String::from("pressure_kPa,marker,dx_mm,dy_mm,var_mm\n");
    for m in 1..=6 {
        exp.push_str(&format!("20,{m},0,{},0.1\n", 0.001 * m as f64));
    }
    std::fs::write(dir.path().join("exp.csv"), exp).unwrap();
    let o = ibr(&["simulate", "--config", "short.toml", "--exp", "exp.csv", "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains("accuracy = -,"), "{}", stdout(&o));
    assert!(stdout(&o).contains("%, quasi-static"), "{}", stdout(&o));
}
