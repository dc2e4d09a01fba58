//! End-to-end checks of the binary: exit codes, file outputs, report
//! shapes, determinism, and the environment tolerance override.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omega-cloud"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn write_polygon(path: &Path, vertices: &[[f64; 2]]) {
    let file = serde_json::json!({ "format-version": 1, "vertices": vertices });
    std::fs::write(path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
}

fn equilateral(path: &Path) {
    let v: Vec<[f64; 2]> = (0..3)
        .map(|i| {
            let a = PI / 2.0 - TAU * i as f64 / 3.0;
            [a.cos(), a.sin()]
        })
        .collect();
    write_polygon(path, &v);
}

fn regular_kgon(path: &Path, k: usize) {
    let v: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let a = PI / 2.0 - TAU * i as f64 / k as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    write_polygon(path, &v);
}

/// Triangle with internal angles pi/3, 16pi/45, 14pi/45, whose cloud at
/// aperture 2pi/3 is also the cloud of a hexagon at aperture 5pi/6.
fn two_aperture_triangle(path: &Path) {
    let (a, c) = (PI / 3.0, 14.0 * PI / 45.0);
    let phi_a = PI / 2.0;
    let phi_b = phi_a - 2.0 * c;
    let phi_c = phi_b - 2.0 * a;
    let v: Vec<[f64; 2]> = [phi_a, phi_b, phi_c]
        .iter()
        .map(|&p| [p.cos(), p.sin()])
        .collect();
    write_polygon(path, &v);
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().expect("tempdir")
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn arc_count(path: &Path) -> usize {
    let text = std::fs::read_to_string(path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["arcs"].as_array().unwrap().len()
}

fn vertex_count(path: &Path) -> usize {
    let text = std::fs::read_to_string(path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["vertices"].as_array().unwrap().len()
}

#[test]
fn cloud_of_equilateral_triangle_has_three_arcs() {
    let dir = tmp();
    let poly = path(&dir, "tri.json");
    let cloud = path(&dir, "cloud.json");
    equilateral(&poly);
    let out = run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        &(PI / 2.0).to_string(),
        "--out",
        cloud.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(arc_count(&cloud), 3);
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["arcs"], 3);
}

#[test]
fn maximal_cloud_of_hexagon_at_matching_aperture_is_one_circle() {
    let dir = tmp();
    let poly = path(&dir, "hex.json");
    let cloud = path(&dir, "cloud.json");
    regular_kgon(&poly, 6);
    let out = run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        &(5.0 * PI / 6.0).to_string(),
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(arc_count(&cloud), 1);
}

#[test]
fn aperture_of_pi_is_rejected_with_exit_2() {
    let dir = tmp();
    let poly = path(&dir, "tri.json");
    equilateral(&poly);
    let out = run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        &PI.to_string(),
        "--out",
        path(&dir, "cloud.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let diag: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert!(diag["detail"]
        .as_str()
        .unwrap()
        .contains("omega out of range"));
}

#[test]
fn one_cloud_reconstructs_to_two_polygons_by_aperture() {
    let dir = tmp();
    let poly = path(&dir, "prop.json");
    let cloud = path(&dir, "cloud.json");
    two_aperture_triangle(&poly);
    let out = run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        &(2.0 * PI / 3.0).to_string(),
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(arc_count(&cloud), 3);

    let tri_out = path(&dir, "triangle.json");
    let out = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--omega",
        "2.0943951",
        "--out",
        tri_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(vertex_count(&tri_out), 3);
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["certified"], true);
    assert!(report["pivot_visits"].as_u64().is_some());
    assert!(report["narrow_count"].as_u64().is_some());

    let hex_out = path(&dir, "hexagon.json");
    let out = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--omega",
        "2.6179939",
        "--out",
        hex_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(vertex_count(&hex_out), 6);
}

#[test]
fn full_circle_cloud_is_ambiguous_with_exit_4() {
    let dir = tmp();
    let poly = path(&dir, "hex.json");
    let cloud = path(&dir, "cloud.json");
    regular_kgon(&poly, 6);
    run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        &(5.0 * PI / 6.0).to_string(),
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    let out = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--omega",
        &(5.0 * PI / 6.0).to_string(),
        "--out",
        path(&dir, "poly.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
}

#[test]
fn wrong_aperture_for_cloud_structure_is_exit_3() {
    let dir = tmp();
    let poly = path(&dir, "tri.json");
    let cloud = path(&dir, "cloud.json");
    equilateral(&poly);
    run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        &(PI / 2.0).to_string(),
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    // Arcs of measure pi cannot belong to an aperture whose stretch turn
    // is far smaller, so the scan rejects the cloud outright.
    let out = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--omega",
        "2.8",
        "--out",
        path(&dir, "poly.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
}

#[test]
fn reconstruct_needs_exactly_one_aperture_source() {
    let dir = tmp();
    let poly = path(&dir, "tri.json");
    let cloud = path(&dir, "cloud.json");
    equilateral(&poly);
    run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        "1.0",
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    let both = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--omega",
        "1.0",
        "--oblivious",
        "--out",
        path(&dir, "a.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&both), 2);
    let neither = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--out",
        path(&dir, "b.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&neither), 2);
}

#[test]
fn oblivious_reconstruction_recovers_the_aperture() {
    let dir = tmp();
    let poly = path(&dir, "poly.json");
    let cloud = path(&dir, "cloud.json");
    let out = run(&[
        "generate",
        "--n",
        "7",
        "--seed",
        "21",
        "--out",
        poly.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        "1.1",
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    let rec = path(&dir, "rec.json");
    let out = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--oblivious",
        "--out",
        rec.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let w = report["omega"].as_f64().unwrap();
    assert!((w - 1.1).abs() <= 1e-9, "recovered aperture {w}");
    assert_eq!(vertex_count(&rec), 7);
}

#[test]
fn roundtrip_passes_and_corruption_fails() {
    let out = run(&[
        "roundtrip",
        "--n",
        "8",
        "--omega",
        "1.2",
        "--seed",
        "3",
        "--count",
        "40",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stdout: {}\nstderr: {}",
        stdout(&out),
        stderr(&out)
    );
    let text = stdout(&out);
    assert!(text.contains("all 40 passed"));
    assert!(text.contains("max vertex error"));

    let out = run(&[
        "roundtrip",
        "--n",
        "6",
        "--omega",
        "1.0",
        "--seed",
        "3",
        "--count",
        "3",
        "--corrupt",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("rejected"));
}

#[test]
fn render_produces_expected_structure() {
    let dir = tmp();
    let poly = path(&dir, "tri.json");
    let cloud = path(&dir, "cloud.json");
    let svg = path(&dir, "fig.svg");
    equilateral(&poly);
    run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        "1.2",
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    let arcs = arc_count(&cloud);
    let out = run(&[
        "render",
        poly.to_str().unwrap(),
        cloud.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("class=\"polygon\"").count(), 1);
    assert_eq!(text.matches("class=\"arc\"").count(), arcs);
    assert_eq!(text.matches("class=\"pivot\"").count(), arcs);

    let only = path(&dir, "poly-only.svg");
    let out = run(&[
        "render",
        poly.to_str().unwrap(),
        "--out",
        only.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&only).unwrap();
    assert_eq!(text.matches("class=\"polygon\"").count(), 1);
    assert_eq!(text.matches("class=\"arc\"").count(), 0);
}

#[test]
fn render_rejects_empty_arc_list_with_exit_2() {
    let dir = tmp();
    let bad = path(&dir, "empty.json");
    std::fs::write(
        &bad,
        "{\"format-version\":1,\"omega\":null,\"maximal\":false,\"arcs\":[]}",
    )
    .unwrap();
    let out = run(&[
        "render",
        bad.to_str().unwrap(),
        "--out",
        path(&dir, "fig.svg").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("empty arc list"));
}

#[test]
fn identical_inputs_give_byte_identical_outputs() {
    let dir = tmp();
    let poly = path(&dir, "poly.json");
    run(&[
        "generate",
        "--n",
        "9",
        "--seed",
        "77",
        "--out",
        poly.to_str().unwrap(),
    ]);
    let c1 = path(&dir, "c1.json");
    let c2 = path(&dir, "c2.json");
    for c in [&c1, &c2] {
        let out = run(&[
            "cloud",
            poly.to_str().unwrap(),
            "--omega",
            "0.9",
            "--maximal",
            "--out",
            c.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&c1).unwrap(), std::fs::read(&c2).unwrap());

    let s1 = path(&dir, "f1.svg");
    let s2 = path(&dir, "f2.svg");
    for s in [&s1, &s2] {
        run(&[
            "render",
            poly.to_str().unwrap(),
            c1.to_str().unwrap(),
            "--out",
            s.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());
}

#[test]
fn reconstruct_round_trips_the_generated_polygon() {
    let dir = tmp();
    let poly = path(&dir, "poly.json");
    let cloud = path(&dir, "cloud.json");
    run(&[
        "generate",
        "--n",
        "11",
        "--seed",
        "5",
        "--out",
        poly.to_str().unwrap(),
    ]);
    run(&[
        "cloud",
        poly.to_str().unwrap(),
        "--omega",
        "2.0",
        "--maximal",
        "--out",
        cloud.to_str().unwrap(),
    ]);
    let rec = path(&dir, "rec.json");
    let out = run(&[
        "reconstruct",
        cloud.to_str().unwrap(),
        "--omega",
        "2.0",
        "--out",
        rec.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let original: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&poly).unwrap()).unwrap();
    let rebuilt: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    let a = original["vertices"].as_array().unwrap();
    let b = rebuilt["vertices"].as_array().unwrap();
    assert_eq!(a.len(), b.len());
    // Vertex lists may start at different cyclic positions.
    let first = [b[0][0].as_f64().unwrap(), b[0][1].as_f64().unwrap()];
    let offset = a
        .iter()
        .position(|v| {
            (v[0].as_f64().unwrap() - first[0]).abs() < 1e-6
                && (v[1].as_f64().unwrap() - first[1]).abs() < 1e-6
        })
        .expect("aligned start vertex");
    for (i, bv) in b.iter().enumerate() {
        let av = &a[(offset + i) % a.len()];
        assert!((av[0].as_f64().unwrap() - bv[0].as_f64().unwrap()).abs() < 1e-9);
        assert!((av[1].as_f64().unwrap() - bv[1].as_f64().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn generate_rejects_degenerate_counts() {
    let dir = tmp();
    let out = run(&[
        "generate",
        "--n",
        "2",
        "--seed",
        "1",
        "--out",
        path(&dir, "p.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tolerance_override_from_environment_still_round_trips() {
    let dir = tmp();
    let poly = path(&dir, "poly.json");
    let cloud = path(&dir, "cloud.json");
    run(&[
        "generate",
        "--n",
        "6",
        "--seed",
        "13",
        "--out",
        poly.to_str().unwrap(),
    ]);
    let out = bin()
        .env("OMEGA_CLOUD_EPS", "1e-7")
        .args([
            "cloud",
            poly.to_str().unwrap(),
            "--omega",
            "1.4",
            "--maximal",
            "--out",
            cloud.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rec = path(&dir, "rec.json");
    let out = bin()
        .env("OMEGA_CLOUD_EPS", "1e-7")
        .args([
            "reconstruct",
            cloud.to_str().unwrap(),
            "--omega",
            "1.4",
            "--out",
            rec.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(vertex_count(&rec), 6);
}
