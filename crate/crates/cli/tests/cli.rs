//! Black-box tests of the `umbilic-atlas` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use umbilic_core::gallery::{build, GalleryArgs};
use umbilic_core::pairs::pair_curvatures;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_umbilic-atlas"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn abstract_diagonal_pair() {
    let p = spec("abstract_diag.json");
    let r = report(&["analyze", "--surface", p.to_str().unwrap(), "--at", "0.1,-0.2"]);
    let res = &r["results"];
    // A = I, B = diag(2, 4): principal curvatures 2 and 4.
    assert_eq!(num(&res["H"]), 3.0);
    assert_eq!(num(&res["K_e"]), 8.0);
    assert_eq!(num(&res["q"]), 1.0);
    assert_eq!(res["pair"], "abstract");
    assert_eq!(res["umbilic"], false);
    assert_eq!(r["input"]["kind"], "file");
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn round_sphere_is_umbilic_everywhere() {
    let r = report(&["analyze", "--gallery", "round_sphere", "--params", "r=2", "--at", "1.0,0.4"]);
    let res = &r["results"];
    assert!((num(&res["H"]) - 0.5).abs() < 1e-12);
    assert!(num(&res["q_normalized"]) < 1e-12);
    assert_eq!(res["umbilic"], true);
    assert_eq!(r["input"]["resolved"]["r"], 2.0);
}

#[test]
fn analyze_matches_library_bit_for_bit() {
    let s = build("ellipsoid", &GalleryArgs::new()).unwrap();
    for (u, v) in [(0.3, 0.2), (2.0, -0.7), (4.5, 1.1)] {
        let at = format!("{u},{v}");
        let r = report(&["analyze", "--gallery", "ellipsoid", "--at", &at]);
        let lib = pair_curvatures(&s.pair, u, v).unwrap();
        let res = &r["results"];
        assert_eq!(num(&res["H"]).to_bits(), lib.h.to_bits());
        assert_eq!(num(&res["K_e"]).to_bits(), lib.k_e.to_bits());
        assert_eq!(num(&res["q"]).to_bits(), lib.q.to_bits());
    }
}

#[test]
fn sequential_and_parallel_scans_agree() {
    let par = report(&["scan", "--gallery", "ellipsoid", "--grid", "48"]);
    let seq = report(&["scan", "--gallery", "ellipsoid", "--grid", "48", "--sequential"]);
    assert_eq!(par["results"], seq["results"]);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["analyze", "--surface", spec("bad_ambient.json").to_str().unwrap(), "--at", "0,0"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["analyze", "--surface", "/nonexistent/surface.json", "--at", "0,0"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--gallery", "no_such_entry", "--at", "0,0"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--gallery", "torus", "--at", "zero,0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["analyze", "--gallery", "torus", "--params", "r=5"]).status.code(), Some(1));
    // Numerical failure: an index loop around a non-umbilic point.
    let saddle = spec("monkey_saddle.json");
    let out = run(&["index", "--surface", saddle.to_str().unwrap(), "--at", "0.3,0.3", "--radius", "0.01"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn monkey_saddle_star() {
    let saddle = spec("monkey_saddle.json");
    let r = report(&["scan", "--surface", saddle.to_str().unwrap(), "--grid", "32"]);
    assert_eq!(r["results"]["umbilics"]["kind"], "isolated");
    let found = r["results"]["umbilics"]["records"].as_array().unwrap();
    assert_eq!(found.len(), 1, "{found:?}");
    assert!(num(&found[0]["u"]).abs() < 1e-6 && num(&found[0]["v"]).abs() < 1e-6);
    assert_eq!(num(&found[0]["index"]["index"]), -0.5);
    let idx = report(&["index", "--surface", saddle.to_str().unwrap(), "--at", "0,0"]);
    assert_eq!(num(&idx["results"]["index"]["index"]), -0.5);
}

#[test]
fn gallery_listing_and_info() {
    let r = report(&["gallery"]);
    let names: Vec<&str> =
        r["results"]["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["plane", "round_sphere", "ellipsoid", "torus", "cgc_rotational", "k_rotational_product", "synthetic_qz"] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
    let info = report(&["gallery", "--gallery", "torus"]);
    assert!(info["results"]["expected_properties"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn verify_torus() {
    let r = report(&["verify", "--gallery", "torus"]);
    assert_eq!(r["results"]["pass"], true, "{:#}", r["results"]);
}

#[test]
fn audit_cgc_disk_from_gallery_and_file() {
    let g = report(&["audit", "--gallery", "cgc_rotational"]);
    assert_eq!(g["results"]["pass"], true);
    assert!((num(&g["results"]["raw_sum"]) - 1.0).abs() < 0.05);
    let f = spec("cgc_disk.json");
    let r = report(&["audit", "--surface", f.to_str().unwrap()]);
    assert_eq!(r["results"]["pass"], true, "{:#}", r["results"]);
    assert_eq!(num(&r["results"]["index_sum"]), 1.0);
    assert!(r["tolerances"].is_object());
}

#[test]
fn closed_ellipsoid_audit() {
    let r = report(&["audit", "--gallery", "ellipsoid", "--closed"]);
    assert_eq!(r["results"]["interior"].as_array().unwrap().len(), 4);
    assert_eq!(num(&r["results"]["index_sum"]), 2.0);
    assert_eq!(r["results"]["pass"], true);
}

#[test]
fn ellipsoid_verdict_flags_hypothesis_one() {
    let r = report(&["verdict", "--gallery", "ellipsoid"]);
    assert_eq!(r["results"]["verdict"], "NOT-APPLICABLE");
    assert_eq!(r["results"]["failing"], serde_json::json!(["hypothesis-1"]));
}

#[test]
fn csv_and_svg_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    report(&["scan", "--gallery", "torus", "--grid", "8", "--csv", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("i,j,u,v,H,K_e,q,q_normalized"));
    assert_eq!(rows.count(), 64);

    let svg = dir.path().join("lines.svg");
    let r = report(&["lines", "--gallery", "cgc_rotational", "--seeds", "3", "--out", svg.to_str().unwrap()]);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert!(text.contains("#1f5fbf") && text.contains("#c0392b"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert!(r["results"].is_object());
}

#[test]
fn human_output_is_not_json() {
    let out = run(&["analyze", "--gallery", "plane", "--at", "0,0", "--human"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(serde_json::from_str::<Value>(&text).is_err());
    assert!(text.lines().any(|l| l.trim_start().starts_with("H: ")));
    assert_eq!(run(&["analyze", "--gallery", "plane", "--at", "0,0", "--human", "--json"]).status.code(), Some(1));
}

#[test]
fn inline_surface_with_disk_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("paraboloid.json");
    std::fs::write(
        &path,
        r#"{"ambient": "R3", "immersion": ["u", "v", "a*(u^2 + v^2)"], "params": {"a": 0.5}, "domain": [-1, 1, -1, 1]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let r = report(&["scan", "--surface", p, "--disk", "-0.5,0.5,-0.5,0.5"]);
    // Paraboloid of revolution: one degenerate umbilic at the vertex, index +1.
    let found = r["results"]["umbilics"]["records"].as_array().unwrap();
    assert_eq!(found.len(), 1, "{found:?}");
    assert_eq!(num(&found[0]["index"]["index"]), 1.0);
    assert_eq!(r["results"]["region"]["bbox"], serde_json::json!([-0.5, 0.5, -0.5, 0.5]));
    // A square is not bounded by curvature lines here, so the audit refuses it.
    let out = run(&["audit", "--surface", p, "--disk", "-0.5,0.5,-0.5,0.5"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a curvature line"));
    // No disk attached and none given.
    assert_eq!(run(&["audit", "--surface", p]).status.code(), Some(1));
}
