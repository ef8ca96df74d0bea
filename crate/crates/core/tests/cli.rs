use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equitangent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn frame_odd_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, r#"{"vertices":[[1,0],[0.3,0.9],[-0.8,0.4],[-0.5,-0.7],[0.6,-0.8]]}"#).unwrap();
    let o = run(&["frame", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["polygon"]["framing_directions"].as_array().unwrap().len(), 5);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn frame_rejects_non_cyclic_even_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    fs::write(&path, r#"{"vertices":[[1,0],[0,1],[-1,0.3],[0,-1]]}"#).unwrap();
    let o = run(&["frame", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "precondition");
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"vertices":[[1,0],"#).unwrap();
    assert_eq!(run(&["frame", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["frame", "/nonexistent/p.json"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn rank_summary_and_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rank.json");
    let o = run(&["rank", "--n", "5", "--count", "4", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "2n achieved 4/4");
    let reports: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["rank"] == 10 && r["n"] == 5));

    let o = run(&["rank", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n = 4"));
}

#[test]
fn rank_bigon_mode() {
    let o = run(&["rank", "--bigon", "--count", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!(v.as_array().unwrap().iter().all(|c| c["certificate"]["rank"] == 5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("5 achieved 5/5"));
}

#[test]
fn spectrum_prints_ratio_line() {
    let o = run(&["spectrum", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("0.236067977499790 (sqrt(5) - 2 = 0.236067977499790)"));
    assert_eq!(run(&["spectrum", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn bicentric_euler_triangle() {
    let o = run(&["bicentric", "--n", "3", "--r", "0.4", "--d", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!((v["config"]["R"].as_f64().unwrap() - 0.9).abs() < 1e-9);
    assert!(v["max_closure_defect"].as_f64().unwrap() < 1e-9);
}

#[test]
fn construct_octagon_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oct.svg");
    let o = run(&["construct", "--n", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 2);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["max_asymmetry"].as_f64().unwrap() < 1e-8);
    assert_eq!(run(&["construct", "--n", "6"]).status.code(), Some(2));
}

#[test]
fn flow_csv_is_deterministic() {
    let a = run(&["flow", "--n", "5", "--seed", "3", "--time", "1", "--step", "0.01"]);
    let b = run(&["flow", "--n", "5", "--seed", "3", "--time", "1", "--step", "0.01"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("t,psi_1,psi_2,psi_3,psi_4,psi_5\n"));
    assert_eq!(text.lines().count(), 102);
    assert_eq!(run(&["flow", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn chain_roundtrip_through_files() {
    let o = run(&["chain", "--n", "5", "--count", "2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fp.json");
    fs::write(&path, serde_json::to_string(&v[0]["framed"]).unwrap()).unwrap();
    let back = run(&["chain", path.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
    let w = stdout_json(&back);
    let r0: Vec<f64> = serde_json::from_value(v[0]["chain"]["signed_radii"].clone()).unwrap();
    let r1: Vec<f64> = serde_json::from_value(w[0]["chain"]["signed_radii"].clone()).unwrap();
    // the framed polygon determines the chain up to adding a constant to the radii
    let shift = r1[0] - r0[0];
    assert!(r0.iter().zip(&r1).all(|(a, b)| (b - a - shift).abs() < 1e-8));
}

#[test]
fn bigon_verdict_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.csv");
    // moving in p alone violates dp + q dφ + tan α dr = 0
    let mut text = String::from("t,p,q,r,alpha,phi\n");
    for k in 0..21 {
        let t = k as f64 * 0.05;
        text.push_str(&format!("{t},{t},0,1,0.7,0.3\n"));
    }
    fs::write(&path, text).unwrap();
    let o = run(&["bigon", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bigon_alpha_path_is_a_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.csv");
    let mut text = String::from("t,p,q,r,alpha,phi\n");
    for k in 0..21 {
        let t = k as f64 * 0.05;
        text.push_str(&format!("{t},0.2,0.1,1,{},0.3\n", 0.4 + 0.5 * t));
    }
    fs::write(&path, text).unwrap();
    let o = run(&["bigon", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "SINGULAR-CANDIDATE");
}
