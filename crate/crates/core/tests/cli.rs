mod common;

use std::process::{Command, Output};

use serde_json::Value;

use common::maps_dir;

fn roadplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadplan"))
        .args(args)
        .output()
        .unwrap()
}

fn map(name: &str) -> String {
    maps_dir().join(name).to_string_lossy().into_owned()
}

#[test]
fn plan_loop_to_stdout() {
    let out = roadplan(&["plan", &map("loop.json"), "--start", "2,0", "--goal", "2,3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,theta"));
    let pts: Vec<(f64, f64)> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    let len: f64 = pts
        .windows(2)
        .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
        .sum();
    assert!((len - 3.0).abs() < 0.01, "{len}");
}

#[test]
fn plan_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, svg, metrics) = (
        dir.path().join("p.csv"),
        dir.path().join("p.svg"),
        dir.path().join("m.json"),
    );
    let out = roadplan(&[
        "plan",
        &map("loop.json"),
        "--start",
        "1,-0.5",
        "--goal",
        "9,3.5",
        "--planner",
        "dijkstra-ss",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--metrics",
        metrics.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&metrics).unwrap()).unwrap();
    for k in ["t_s", "l_m", "d_e_m", "theta_e_rad", "j_cost"] {
        assert!(m[k].is_number(), "{k}");
    }
    let rendered = dir.path().join("r.svg");
    let out = roadplan(&[
        "render",
        &map("loop.json"),
        "--path",
        csv.to_str().unwrap(),
        "--svg",
        rendered.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&rendered).unwrap().contains("<polyline"));
}

#[test]
fn bench_report_structure() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.json");
    let out = roadplan(&[
        "bench",
        &map("twocross.json"),
        &map("twocross_scenarios.json"),
        "--cycles",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    for c in ["Dijkstra", "Dijkstra-in-SS", "Ours"] {
        assert!(cols.contains(&c), "{cols:?}");
    }
    let sc = v["scenarios"].as_array().unwrap();
    assert_eq!(sc.len(), 5);
    for s in sc {
        for row in ["t", "l", "d_e", "theta_e"] {
            assert!(s["rows"][row]["Ours"].is_number(), "{row}");
        }
    }
}

#[test]
fn validate_map_prints_report() {
    let out = roadplan(&["validate-map", &map("loop.json")]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lanes"], 4);
}

#[test]
fn exit_codes() {
    assert_eq!(roadplan(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(roadplan(&["plan", &map("loop.json"), "--start", "2,0"]).status.code(), Some(2));
    assert_eq!(roadplan(&["validate-map", "/nonexistent/map.json"]).status.code(), Some(3));
    let off_map = roadplan(&["plan", &map("loop.json"), "--start", "50,50", "--goal", "2,3"]);
    assert_eq!(off_map.status.code(), Some(1));
}
