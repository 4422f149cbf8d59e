use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_interact-auth");

fn cli(run: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--run-dir")
        .arg(run)
        .args(args)
        .env_remove("INTERACT_AUTH_RUN_DIR")
        .output()
        .expect("binary runs")
}

fn ok(run: &Path, args: &[&str]) {
    let out = cli(run, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

/// One small synthetic session shared by every test.
fn session() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-session");
        let _ = std::fs::remove_dir_all(&dir);
        ok(
            &dir,
            &["synth", "--seed", "3", "--users", "5", "--objects", "4", "--runs", "10", "--attack-runs", "3"],
        );
        dir
    })
}

fn data_args() -> Vec<String> {
    vec!["--data".into(), session().join("data").display().to_string()]
}

fn run_with(run: &Path, args: &[&str]) -> Output {
    let mut all: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    all.extend(data_args());
    let refs: Vec<&str> = all.iter().map(String::as_str).collect();
    cli(run, &refs)
}

fn error_line(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let last = stderr.lines().last().expect("an error line");
    serde_json::from_str(last).expect("error line is JSON")
}

#[test]
fn synth_writes_dataset_and_manifest() {
    let data = session().join("data");
    for f in ["recordings.jsonl", "runs.jsonl", "colocation.json", "manifest.json"] {
        assert!(data.join(f).is_file(), "missing {f}");
    }
    let m = json(&data.join("manifest.json"));
    assert_eq!(m["command"], "synth");
    assert_eq!(m["seed"], 3);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert!(m["versions"]["interact-auth"].is_string());
}

#[test]
fn evaluate_then_report() {
    let run = tempfile::tempdir().unwrap();
    let out = run_with(
        run.path(),
        &["evaluate", "--victim", "U1", "--config", "offobject", "--tuning", "fixed", "--seed", "1"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = run.path().join("evaluate/U1-offobject-forest");
    let report = json(&dir.join("report.json"));
    assert_eq!(report["victim_id"], "U1");
    assert_eq!(report["objects"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(dir.join("frr_at_far.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "far,offobject/zero_effort,offobject/video,offobject/in_person"
    );
    assert_eq!(lines.count(), 2);
    for object in ["O1", "O2", "O3", "O4"] {
        for attack in ["zero_effort", "video", "in_person"] {
            let roc = dir.join(format!("roc_points/{object}_{attack}.csv"));
            let text = std::fs::read_to_string(&roc).unwrap();
            assert!(text.starts_with("threshold,far,frr\n"));
            assert!(text.trim_end().ends_with("inf,0,1"), "{roc:?}");
        }
    }
    let m = json(&dir.join("manifest.json"));
    assert_eq!(m["command"], "evaluate");
    assert_eq!(m["seed"], 1);
    assert!(m["inputs"]["recordings.jsonl"].is_string());

    ok(run.path(), &["report"]);
    let agg = run.path().join("report");
    assert_eq!(std::fs::read_to_string(agg.join("frr_at_far.csv")).unwrap(), csv);
    assert_eq!(json(&agg.join("summary.json")).as_array().unwrap().len(), 1);
}

#[test]
fn rmi_table_has_one_row_per_object() {
    let run = tempfile::tempdir().unwrap();
    let out = run_with(run.path(), &["rmi", "--config", "combined"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(run.path().join("rmi/combined/rmi_report.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["object", "ACC", "MAG", "GYRO", "MIC"]);
    assert_eq!(rows.len(), 5);
    for row in &rows[1..] {
        assert_eq!(row.len(), 5);
        for cell in &row[1..] {
            let v: f64 = cell.parse().unwrap();
            assert!((0.0..=100.0).contains(&v), "{row:?}");
        }
    }
}

#[test]
fn validation_errors_are_json_with_exit_code_two() {
    let run = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["evaluate", "--victim", "U9", "--config", "offobject", "--seed", "1"],
        &["evaluate", "--victim", "U1", "--config", "offobject", "--seed", "1", "--far", "1.5"],
        &["evaluate", "--victim", "U1", "--config", "sideways", "--seed", "1"],
        &["evaluate", "--victim", "U1", "--config", "offobject"],
    ];
    for args in cases {
        let out = run_with(run.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e = error_line(&out);
        assert_eq!(e["error"], "validation", "{args:?}");
        assert!(e["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
}

#[test]
fn missing_data_is_an_io_error() {
    let run = tempfile::tempdir().unwrap();
    let out = cli(run.path(), &["ingest"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_line(&out)["error"], "io");
}

#[test]
fn reruns_are_byte_identical() {
    let run = tempfile::tempdir().unwrap();
    let outs: Vec<PathBuf> = ["a", "b"].iter().map(|n| run.path().join(n)).collect();
    for o in &outs {
        let out = run_with(
            run.path(),
            &["evaluate", "--victim", "U2", "--config", "combined", "--tuning", "fixed", "--seed", "9", "--out", o.to_str().unwrap()],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["report.json", "frr_at_far.csv", "manifest.json", "roc_points/O3_zero_effort.csv"] {
        assert_eq!(
            std::fs::read(outs[0].join(f)).unwrap(),
            std::fs::read(outs[1].join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn train_writes_model_and_ensemble_bundles() {
    let run = tempfile::tempdir().unwrap();
    let out = run_with(
        run.path(),
        &[
            "train", "--victim", "U1", "--config", "onobject", "--tuning", "fixed", "--seed", "2",
            "--ensemble", "voting", "--members", "O1,O3",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = run.path().join("train/U1-onobject-forest");
    for object in ["O1", "O2", "O3", "O4"] {
        let b = json(&dir.join(format!("models/{object}.json")));
        assert_eq!(b["format"], "interact-auth-model");
        assert_eq!(b["version"], 1);
        assert_eq!(b["victim_id"], "U1");
        assert!(b["model"].is_object());
        assert!(b["normalization"].is_object() || b["normalization"].is_array());
    }
    let e = json(&dir.join("ensemble.json"));
    assert_eq!(e["format"], "interact-auth-ensemble");
    assert_eq!(e["ensemble"]["kind"], "VOTING");
    let files: Vec<&str> = e["member_files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(files, ["models/O1.json", "models/O3.json"]);

    let bad = run_with(
        run.path(),
        &["train", "--victim", "U1", "--config", "onobject", "--tuning", "fixed", "--seed", "2", "--ensemble", "voting", "--members", "O7"],
    );
    assert_eq!(bad.status.code(), Some(2));
}
