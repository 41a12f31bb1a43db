use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fractalis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractalis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_fixture(mode: &str, name: &str, out: &Path, extra: &[&str]) -> Output {
    let config = fixtures().join(format!("{name}.json"));
    let mut args = vec![
        mode,
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    fractalis(&args)
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn example_curve(scaling: Value) -> Value {
    serde_json::json!({
        "nodes": [[0, 20], [0.25, 30], [0.5, 10], [0.75, 50], [1.0, 10]],
        "domains": [[0, 2], [2, 4]],
        "gamma": [1, 2, 1, 2],
        "scaling": scaling,
    })
}

fn mode_of(name: &str) -> &'static str {
    if name.starts_with("analyze") {
        "analyze"
    } else if name.starts_with("fig3") || name.starts_with("fig4") {
        "surface"
    } else {
        "curve"
    }
}

#[test]
fn curve_csv_runs_between_the_end_nodes() {
    let out = TempDir::new().unwrap();
    let res = run_fixture("curve", "fig1a", out.path(), &[]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = std::fs::read_to_string(out.path().join("curve.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.first(), Some(&"0,20"));
    assert_eq!(lines.last(), Some(&"1,10"));
    // 4 regions, two nodes per domain: 4 * 2^8 + 1 points
    assert_eq!(lines.len(), 4 * 256 + 1);
    let report = read_json(&out.path().join("curve_report.json"));
    assert_eq!(report["depth"], 8);
    assert!(report["functional_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn depth_zero_emits_the_nodes() {
    let out = TempDir::new().unwrap();
    let res = run_fixture("curve", "fig1a", out.path(), &["--depth", "0"]);
    assert!(res.status.success());
    let csv = std::fs::read_to_string(out.path().join("curve.csv")).unwrap();
    assert_eq!(csv, "0,20\n0.25,30\n0.5,10\n0.75,50\n1,10\n");
}

#[test]
fn malformed_gamma_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let mut curve = example_curve(serde_json::json!({"kind": "constant", "value": 0.5}));
    curve["gamma"] = serde_json::json!([1, 3, 1, 2]);
    let config = write_config(
        dir.path(),
        "bad.json",
        &serde_json::json!({"mode": "curve", "curve": curve}),
    );
    let res = fractalis(&["curve", "--config", config.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("gamma"));
}

#[test]
fn mode_mismatch_and_unknown_fields_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let config = fixtures().join("fig1a.json");
    let res = fractalis(&["surface", "--config", config.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let typo = write_config(
        dir.path(),
        "typo.json",
        &serde_json::json!({"mode": "curve", "dpeth": 3}),
    );
    let res = fractalis(&["curve", "--config", typo.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn resolution_one_is_rejected() {
    let out = TempDir::new().unwrap();
    let res = run_fixture("surface", "fig3a", out.path(), &["--resolution", "1"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let res = run_fixture("curve", "fig1a", &blocker.join("sub"), &["--depth", "1"]);
    assert_eq!(res.status.code(), Some(1));
}

fn pgm_body(bytes: &[u8]) -> (usize, Vec<u16>) {
    let text_end = bytes
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .nth(2)
        .unwrap()
        .0;
    let header = std::str::from_utf8(&bytes[..text_end]).unwrap();
    let fields: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(fields[0], "P5");
    assert_eq!(fields[3], "65535");
    let side: usize = fields[1].parse().unwrap();
    let body = bytes[text_end + 1..]
        .chunks(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect::<Vec<_>>();
    assert_eq!(body.len(), side * side);
    (side, body)
}

#[test]
fn surface_corner_pixel_matches_the_corner_height() {
    let out = TempDir::new().unwrap();
    let res = run_fixture("surface", "fig3a", out.path(), &["--resolution", "64"]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let report = read_json(&out.path().join("surface_report.json"));
    let corner = report["corner_height"].as_f64().unwrap();
    // 0.5 f(0) + 0.8 g(0) with both curves starting at 20
    assert!((corner - 26.0).abs() < 1e-12);
    let (lo, hi) = (
        report["height_min"].as_f64().unwrap(),
        report["height_max"].as_f64().unwrap(),
    );
    let (side, body) = pgm_body(&std::fs::read(out.path().join("surface.pgm")).unwrap());
    assert_eq!(side, 65);
    let expected = ((corner - lo) / (hi - lo) * 65535.0).round() as u16;
    assert_eq!(body[0], expected);
    let obj = std::fs::read_to_string(out.path().join("surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 65 * 65);
    assert_eq!(
        obj.lines().filter(|l| l.starts_with("f ")).count(),
        2 * 64 * 64
    );
}

#[test]
fn flat_surface_is_uniform_gray() {
    let dir = TempDir::new().unwrap();
    // the curve is scaled by zero, leaving a constant surface
    let config = serde_json::json!({
        "mode": "surface",
        "depth": 2,
        "surface": {
            "resolution": 8,
            "obj": false,
            "x_terms": [{
                "curve": example_curve(serde_json::json!({"kind": "constant", "value": 0.3})),
                "coeff": {"terms": [{"fx": {"kind": "constant", "value": 0.0}, "fy": {"kind": "constant", "value": 1.0}}]},
            }],
        },
    });
    let path = write_config(dir.path(), "flat.json", &config);
    let out = dir.path().join("out");
    let res = fractalis(&[
        "surface",
        "--config",
        path.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let (_, body) = pgm_body(&std::fs::read(out.join("surface.pgm")).unwrap());
    assert!(body.iter().all(|&v| v == 32768));
    assert!(!out.join("surface.obj").exists());
}

#[test]
fn analyze_reports_closed_form_and_measurement() {
    let out = TempDir::new().unwrap();
    let res = run_fixture("analyze", "analyze_s06", out.path(), &[]);
    assert!(res.status.success());
    let report = read_json(&out.path().join("dimension_report.json"));
    let exact = report["theory"]["exact"].as_f64().unwrap();
    assert!((exact - (1.0 + 2.4f64.ln() / 4f64.ln())).abs() < 1e-12);
    let est = report["estimate"]["estimate"].as_f64().unwrap();
    assert!((est - exact).abs() < 0.1);
    let csv = std::fs::read_to_string(out.path().join("box_counts.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let out = TempDir::new().unwrap();
    assert!(run_fixture("analyze", "analyze_s02", out.path(), &[])
        .status
        .success());
    let report = read_json(&out.path().join("dimension_report.json"));
    assert_eq!(report["theory"]["exact"].as_f64(), Some(1.0));
}

#[test]
fn analyze_without_hypotheses_still_measures() {
    let out = TempDir::new().unwrap();
    let res = run_fixture("analyze", "analyze_nonuniform", out.path(), &[]);
    assert!(res.status.success());
    let report = read_json(&out.path().join("dimension_report.json"));
    assert!(report.get("theory").is_none());
    assert!(report["hypotheses_unmet"].is_string());
    assert!(report["estimate"]["estimate"].is_f64());
}

#[test]
fn every_fixture_runs() {
    let mut names: Vec<String> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 12);
    for name in &names {
        let out = TempDir::new().unwrap();
        let res = run_fixture(mode_of(name), name, out.path(), &["--resolution", "32"]);
        assert!(
            res.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
        let written = String::from_utf8(res.stdout).unwrap();
        assert!(written.lines().all(|p| Path::new(p).exists()), "{name}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for out in [&a, &b] {
        assert!(run_fixture("curve", "fig1b", out.path(), &[])
            .status
            .success());
        assert!(
            run_fixture("surface", "fig3b", out.path(), &["--resolution", "48"])
                .status
                .success()
        );
    }
    for file in [
        "curve.csv",
        "curve_report.json",
        "surface.pgm",
        "surface.obj",
        "surface_report.json",
    ] {
        let (x, y) = (
            std::fs::read(a.path().join(file)).unwrap(),
            std::fs::read(b.path().join(file)).unwrap(),
        );
        assert!(x == y, "{file} differs");
    }
}

#[test]
fn surface_terms_can_reference_curve_configs() {
    let dir = TempDir::new().unwrap();
    let curve_path = fixtures().join("fig1a.json");
    let coeff = serde_json::json!({"terms": [{"fx": {"kind": "constant", "value": 1.0}, "fy": {"kind": "constant", "value": 1.0}}]});
    let by_file = serde_json::json!({
        "mode": "surface",
        "surface": {"resolution": 16, "x_terms": [{"curve": curve_path, "coeff": coeff}]},
    });
    let inline = serde_json::json!({
        "mode": "surface",
        "surface": {
            "resolution": 16,
            "x_terms": [{"curve": read_json(&curve_path)["curve"], "coeff": coeff}],
        },
    });
    let mut pgms = Vec::new();
    for (name, config) in [("file.json", by_file), ("inline.json", inline)] {
        let path = write_config(dir.path(), name, &config);
        let out = dir.path().join(name.trim_end_matches(".json"));
        let res = fractalis(&[
            "surface",
            "--config",
            path.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
        pgms.push(std::fs::read(out.join("surface.pgm")).unwrap());
    }
    assert_eq!(pgms[0], pgms[1]);

    let missing = serde_json::json!({
        "mode": "surface",
        "surface": {"x_terms": [{"curve": "nowhere.json", "coeff": coeff}]},
    });
    let path = write_config(dir.path(), "missing.json", &missing);
    let res = fractalis(&["surface", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}
