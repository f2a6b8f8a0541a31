use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use multimesh::io::{load_medit, load_obj, save_medit, save_obj_mesh};
use multimesh::{shapes, Mesh64, PassStats};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mm-cli-{}-{test}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multimesh")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stats(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pass_stats(v: &Value) -> PassStats {
    serde_json::from_value(v.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_tetrahedron_boundary() {
    let o = run(&["validate", "--input", s(&data("tetrahedron.obj"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("valid"));
}

#[test]
fn validate_rejects_a_non_manifold_input() {
    let dir = scratch("nonmanifold");
    let path = dir.join("fin.obj");
    // three triangles on one edge
    std::fs::write(&path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n").unwrap();
    let o = run(&["validate", "--input", s(&path)]);
    assert_eq!(code(&o), 1);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["validate"])), 2);
    assert_eq!(code(&run(&["validate", "--input", "/nonexistent/x.obj"])), 2);
    assert_eq!(code(&run(&["validate", "--input", s(&data("unit_tet.mesh")).replace(".mesh", ".ply").as_str()])), 2);
    let cube = data("cube_seam.obj");
    assert_eq!(code(&run(&["decimate", "--input", s(&cube), "--output", "/tmp/never.obj"])), 2);
    let o = run(&["periodic2d", "--input", s(&cube), "--period", "1;1", "--target-length", "0.1", "--output", "/tmp/never.obj"]);
    assert_eq!(code(&o), 2);
    let wrong_kind = r#"{"kind":"periodic2d","target_length":0.1,"period":[1,1]}"#;
    let o = run(&["--config", wrong_kind, "decimate", "--input", s(&cube), "--target-faces", "4", "--output", "/tmp/never.obj"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("config"));
}

#[test]
fn info_reports_seam_histogram() {
    let o = run(&["info", "--input", s(&data("cube_seam.obj"))]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("2-mesh") && lines[0].contains("chi=2"));
    assert!(lines[1].starts_with("  ") && lines[1].contains("2-mesh"));
    assert!(lines[1].contains("{1: 10, 2: 8}"), "{out}");
}

#[test]
fn decimate_with_large_target_is_identity() {
    let dir = scratch("identity");
    let (out, js) = (dir.join("out.obj"), dir.join("stats.json"));
    let input = data("cube_seam.obj");
    let o = run(&["decimate", "--input", s(&input), "--target-faces", "1000", "--output", s(&out), "--json-stats", s(&js)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let st = stats(&js);
    assert_eq!(st["stats"]["accepted"], 0);
    assert_eq!(st["faces_after"], 12);
    let (a, b) = (load_obj::<f64>(&input).unwrap(), load_obj::<f64>(&out).unwrap());
    assert_eq!(a.positions, b.positions);
    assert_eq!(a.uv, b.uv);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn decimate_torus_keeps_charts_and_stats_add_up() {
    let dir = scratch("torus");
    let t = shapes::torus_uv::<f64>(12, 12, 1.0, 0.4);
    let input = dir.join("torus.obj");
    let (mm, uv) = multimesh::apps::seam_multimesh(t.positions, t.uv, &t.pairs).unwrap();
    multimesh::io::save_obj(&mm, Some(uv), &input).unwrap();
    let (out, js) = (dir.join("out.obj"), dir.join("stats.json"));
    let o = run(&["--seed", "7", "decimate", "--input", s(&input), "--target-faces", "72", "--output", s(&out), "--json-stats", s(&js)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let st = stats(&js);
    let p = pass_stats(&st["stats"]);
    assert!(p.is_consistent() && p.accepted > 0);
    assert_eq!(st["seed"], 7);
    let back = load_obj::<f64>(&out).unwrap();
    assert!(back.positions.num_facets() <= 72);
    assert_eq!(back.uv.unwrap().connected_components(), mm.mesh(uv).connected_components());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn remesh_embedded_writes_tets_and_surface() {
    let dir = scratch("embedded");
    let input = dir.join("ball.mesh");
    save_medit(&shapes::tet_cube::<f64>(4, true), &input).unwrap();
    let (out, surf, js) = (dir.join("out.mesh"), dir.join("surface.obj"), dir.join("stats.json"));
    let o = run(&[
        "remesh-embedded", "--input", s(&input), "--target-length", "0.5", "--iters", "2",
        "--output", s(&out), "--surface-out", s(&surf), "--json-stats", s(&js),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let tets: Mesh64 = load_medit(&out).unwrap();
    assert!(multimesh::invariants::positive_volume(&tets).unwrap());
    let surface = load_obj::<f64>(&surf).unwrap().positions;
    assert_eq!(surface.num_facets(), tets.boundary_faces().len());
    let st = stats(&js);
    assert_eq!(st["stats"]["iterations"], 2);
    let total = pass_stats(&st["total"]);
    assert!(total.is_consistent());
    let parts = ["split", "collapse", "swap"].map(|k| pass_stats(&st["stats"][k]).accepted);
    assert_eq!(parts.iter().sum::<usize>(), total.accepted);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn periodic2d_with_config_override() {
    let dir = scratch("periodic");
    let input = dir.join("tile.obj");
    save_obj_mesh(&shapes::grid::<f64>(8, 8, 1.0, 1.0), &input).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"kind":"periodic2d","target_length":0.25,"period":[1.0,1.0],"iterations":2}"#).unwrap();
    let (out, js) = (dir.join("out.obj"), dir.join("stats.json"));
    let o = run(&[
        "--config", s(&cfg), "periodic2d", "--input", s(&input), "--period", "1,1", "--target-length", "5",
        "--output", s(&out), "--json-stats", s(&js),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let st = stats(&js);
    assert_eq!(st["target_length"], 0.25);
    assert_eq!(st["stats"]["iterations"], 2);
    let root = &st["nodes"][0];
    assert_eq!(root["euler"], 0);
    assert_eq!(root["counts"][2], st["nodes"][1]["counts"][2]);
    let tile = load_obj::<f64>(&out).unwrap().positions;
    assert!(tile.num_facets() < 128);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn runs_are_deterministic_for_a_seed() {
    let dir = scratch("determinism");
    let input = dir.join("ball.mesh");
    save_medit(&shapes::tet_cube::<f64>(3, true), &input).unwrap();
    let outs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.join(format!("out{i}.mesh"));
            let o = run(&["--seed", "11", "remesh-embedded", "--input", s(&input), "--target-length", "0.6", "--iters", "1", "--output", s(&out)]);
            assert_eq!(code(&o), 0);
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn archive_output_round_trips_through_info() {
    let dir = scratch("archive");
    let out = dir.join("out.mmsh");
    let o = run(&["decimate", "--input", s(&data("cube_seam.obj")), "--target-faces", "10", "--output", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["validate", "--input", s(&out)]);
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(&out).unwrap();
    assert_eq!(&bytes[..4], b"MMSH");
    std::fs::remove_dir_all(dir).ok();
}
