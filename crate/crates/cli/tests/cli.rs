use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn contframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contframe"))
        .args(args)
        .env_remove("CONTFRAME_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn gaussian_csv(dir: &TempDir, n: usize, half: f64) -> String {
    let dx = 2.0 * half / n as f64;
    let mut s = String::from("x,re,im\n");
    for j in 0..n {
        let t = -half + j as f64 * dx;
        s.push_str(&format!("{t},{},0\n", (-std::f64::consts::PI * t * t / 4.0).exp()));
    }
    write(dir, "signal.csv", &s)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn parseval_verification_reports_unit_bounds() {
    let out = contframe(&["verify", "--construct", "parseval", "--dim", "8", "--cells", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let b = &r["result"]["bounds"];
    assert!((b["A"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((b["B"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(b["parseval"], true);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["tolerances"]["tol_frame"], 1e-10);
}

#[test]
fn bounds_of_three_vectors_in_the_plane() {
    let dir = TempDir::new().unwrap();
    let frame = write(&dir, "f.json", r#"{"vectors": [[1, 0], [0, 1], [1, 1]]}"#);
    let out = contframe(&["bounds", "--frame", &frame, "--expect", "frame"]);
    assert_eq!(out.status.code(), Some(0));
    let b = &report(&out)["result"]["bounds"];
    // eigenvalues of [[2, 1], [1, 2]]
    assert!((b["A"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((b["B"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(b["verdict"], "Frame");
    assert_eq!(b["rank"], 2);
}

#[test]
fn rank_deficient_frame_fails_expectation() {
    let dir = TempDir::new().unwrap();
    let frame = write(&dir, "f.json", r#"{"vectors": [[1, 0, 0], [0, 1, 0], [1, 1, 0]]}"#);
    let out = contframe(&["bounds", "--frame", &frame, "--expect", "frame"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "verification_failed");
    assert_eq!(r["result"]["bounds"]["verdict"], "BesselOnly");
    assert!(r["message"].as_str().unwrap().contains("BesselOnly"));

    let bessel = contframe(&["bounds", "--frame", &frame, "--expect", "bessel"]);
    assert_eq!(bessel.status.code(), Some(0));
}

#[test]
fn input_errors_exit_one_with_a_report() {
    let dir = TempDir::new().unwrap();
    let out = contframe(&["bounds", "--frame", path_str(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "input_error");

    let bad = write(&dir, "bad.json", r#"{"vectors": [[1, 0], [0]]}"#);
    assert_eq!(contframe(&["bounds", "--frame", &bad]).status.code(), Some(1));

    let weights = write(&dir, "w.json", r#"{"construct": "parseval", "partition": {"weights": [1, -2]}}"#);
    let out = contframe(&["construct", "--spec", &weights]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["message"].as_str().unwrap().contains("index 1"));

    let out = contframe(&["verify", "--construct", "parseval", "--dim", "8", "--cells", "7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn construct_then_certify() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.json", r#"{"construct": "parseval", "partition": {"weights": [0.5, 2.0, 7.0]}}"#);
    let frame = dir.path().join("frame.json");
    let out = contframe(&["construct", "--spec", &spec, "--out", path_str(&frame)]);
    assert_eq!(out.status.code(), Some(0));
    let out = contframe(&["bounds", "--frame", path_str(&frame), "--expect", "parseval"]);
    assert_eq!(out.status.code(), Some(0));

    let ex = write(&dir, "ex.json", r#"{"construct": "ex29", "h": [1, [0, 1]]}"#);
    let r = report(&contframe(&["construct", "--spec", &ex]));
    let b = &r["result"]["bounds"];
    assert!(b["A"].as_f64().unwrap() >= 0.81 - 0.02);
    assert!(b["B"].as_f64().unwrap() <= 1.01 + 0.02);
}

#[test]
fn reconstruct_coordinate_vector() {
    let dir = TempDir::new().unwrap();
    let frame = write(&dir, "f.json", r#"{"vectors": [[1, 0], [0, 1], [1, 1]], "weights": [1, 2, 4]}"#);
    let signal = write(&dir, "v.json", r#"[0.5, [1, -2]]"#);
    let out_path = dir.path().join("back.json");
    let out = contframe(&["reconstruct", "--frame", &frame, "--signal", &signal, "--out", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["residual"].as_f64().unwrap() <= 1e-8);
    let back: Vec<[f64; 2]> = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((back[0][0] - 0.5).abs() < 1e-8 && (back[1][1] + 2.0).abs() < 1e-8);

    let flat = write(&dir, "g.json", r#"{"vectors": [[1, 0], [2, 0]]}"#);
    let out = contframe(&["reconstruct", "--frame", &flat, "--signal", &signal]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transforms_write_plot_ready_fields() {
    let dir = TempDir::new().unwrap();
    let signal = gaussian_csv(&dir, 512, 16.0);
    let field = dir.path().join("cwt.csv");
    let out = contframe(&[
        "cwt", "--amin", "0.25", "--amax", "4", "--voices", "8", "--signal", &signal, "--out", path_str(&field),
        "--mirror", "--stride", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&field).unwrap();
    assert!(text.starts_with("a,b,re,im\n"));
    let r = report(&out);
    assert!((r["result"]["admissibility"]["c_psi"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-3);

    let field = dir.path().join("stft.csv");
    let out = contframe(&[
        "stft", "--ymin", "-8", "--ymax", "8", "--dy", "0.25", "--gmin", "-2", "--gmax", "2", "--dg", "0.0625",
        "--signal", &signal, "--out", path_str(&field),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&field).unwrap();
    assert!(text.starts_with("y,gamma,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 65 * 65);
    let ratio = report(&out)["result"]["energy_ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-3, "ratio {ratio}");
}

#[test]
fn reports_are_deterministic_and_mirrored_to_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("report.json");
    let a = contframe(&["verify", "--suite", "small", "--report", path_str(&path)]);
    let b = contframe(&["verify", "--suite", "small"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    let r = report(&a);
    assert_eq!(r["result"]["checks"].as_array().unwrap().len(), 11);
    assert_eq!(r["tolerances"]["tol_recon"], 1e-12);
}

#[test]
fn tightened_reconstruction_tolerance_fails_the_suite() {
    let out = contframe(&["verify", "--suite", "small", "--tol-recon", "1e-15"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    let checks = r["result"]["checks"].as_array().unwrap();
    assert_eq!(checks[0]["name"], "parseval_construction");
    assert_eq!(checks[0]["passed"], false);
}

#[test]
fn thread_cap_is_validated() {
    let ok = Command::new(env!("CARGO_BIN_EXE_contframe"))
        .args(["verify", "--construct", "parseval", "--dim", "4", "--cells", "4"])
        .env("CONTFRAME_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_contframe"))
        .args(["verify", "--construct", "parseval", "--dim", "4", "--cells", "4"])
        .env("CONTFRAME_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
