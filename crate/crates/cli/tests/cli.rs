//! End-to-end CLI contract: exit codes, manifest validation, determinism
//! of reports and dumps.

use std::path::Path;
use std::process::Command;

fn nsv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nsv"))
}

fn write_manifest(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("manifest.json");
    std::fs::write(&path, body).unwrap();
    path
}

/// A small, fast corpus: one shear and one narrow-band random state on a
/// 16-node grid (quadratic band inside the dealias limit).
const SMALL_MANIFEST: &str = r#"{
  "grid": {"n_per_axis": 16, "box_length": 6.283185307179586, "dealias_limit": 7},
  "corpus": {"entries": [
    {"field_id": "shear", "generator": {"kind": "shear", "profile": [[1, 1.0]], "axes": [0, 1], "nu": 1.0}},
    {"field_id": "rnd", "generator": {"kind": "random-divfree", "seed": 7, "band": [2.0, 3.5], "amplitude": 1.0, "nu": 1.0}}
  ]},
  "suites": ["identity"]
}"#;

#[test]
fn units_suite_exits_zero_quickly() {
    let out = tempdir("units");
    let start = std::time::Instant::now();
    let status = nsv()
        .args(["run", "--suite", "units", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(
        start.elapsed().as_secs_f64() < 1.0,
        "units-only run took {:.2}s",
        start.elapsed().as_secs_f64()
    );
    assert!(out.join("reports.jsonl").exists());
    assert!(out.join("summary.txt").exists());
}

#[test]
fn identity_suite_passes_on_small_manifest() {
    let out = tempdir("identity");
    let manifest = write_manifest(&out, SMALL_MANIFEST);
    let status = nsv()
        .args(["run", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn unknown_manifest_keys_exit_two() {
    let out = tempdir("badkey");
    let manifest = write_manifest(&out, r#"{"suites": ["units"], "bogus": 1}"#);
    let status = nsv()
        .args(["run", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_manifest_exits_two() {
    let out = tempdir("malformed");
    let manifest = write_manifest(&out, "{nope");
    let status = nsv()
        .args(["run", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn impossible_tolerance_exits_one() {
    let out = tempdir("tol");
    let body = SMALL_MANIFEST.replace(
        r#""suites": ["identity"]"#,
        r#""suites": ["identity"], "tolerance_overrides": {"identity": 0.0}"#,
    );
    let manifest = write_manifest(&out, &body);
    let status = nsv()
        .args(["run", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(
        status.code(),
        Some(1),
        "rounding cannot meet a zero tolerance"
    );
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let out1 = tempdir("det1");
    let out2 = tempdir("det2");
    for out in [&out1, &out2] {
        let manifest = write_manifest(out, SMALL_MANIFEST);
        let status = nsv()
            .args(["run", "--manifest"])
            .arg(&manifest)
            .arg("--out")
            .arg(out)
            .arg("--jobs")
            .arg("2")
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(out1.join("reports.jsonl")).unwrap();
    let b = std::fs::read(out2.join("reports.jsonl")).unwrap();
    assert_eq!(a, b, "reports must be byte-identical for a fixed manifest");
    let na = std::fs::read(out1.join("norms.csv")).unwrap();
    let nb = std::fs::read(out2.join("norms.csv")).unwrap();
    assert_eq!(na, nb);
}

#[test]
fn dump_field_is_deterministic_and_rejects_unknown_ids() {
    let out = tempdir("dump");
    let manifest = write_manifest(&out, SMALL_MANIFEST);
    for _ in 0..2 {
        let status = nsv()
            .args([
                "dump-field",
                "--field-id",
                "shear",
                "--format",
                "csv",
                "--manifest",
            ])
            .arg(&manifest)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let csv = std::fs::read_to_string(out.join("shear.csv")).unwrap();
    assert!(csv.starts_with("k1,k2,k3,component,re,im\n"));
    // two sine modes in one component
    assert_eq!(csv.lines().count(), 3);

    let status = nsv()
        .args(["dump-field", "--field-id", "nope", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // raw dump with header
    let status = nsv()
        .args([
            "dump-field",
            "--field-id",
            "shear",
            "--format",
            "raw",
            "--manifest",
        ])
        .arg(&manifest)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let raw = std::fs::read(out.join("shear.raw")).unwrap();
    assert_eq!(raw.len(), 3 * 16 * 16 * 16 * 8);
    let header: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("shear.json")).unwrap()).unwrap();
    assert_eq!(header["n_per_axis"], 16);
    assert_eq!(header["components"], 3);
}

#[test]
fn commutator_sweep_decays_monotonically() {
    let out = tempdir("sweep");
    let status = nsv()
        .args(["plot-data", "--family", "commutator-sweep", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("commutator-sweep.csv")).unwrap();
    let residuals: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(residuals.len() >= 5);
    // decay from order 2 to the plateau at high order
    assert!(residuals[0] > *residuals.last().unwrap());
    let mut sorted = residuals.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // allow plateau wiggle at the truncation floor: the first three must
    // be strictly ordered
    assert!(residuals[0] > residuals[1] && residuals[1] > residuals[2]);
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("nsv-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
