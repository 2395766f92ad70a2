use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tipdetect(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tipdetect"));
    cmd.args(args).env_remove("TIPDETECT_CONFIG");
    if let Some(c) = config {
        cmd.env("TIPDETECT_CONFIG", c);
    }
    cmd.output().expect("spawn tipdetect")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, frames: usize, extra: &[&str]) {
    let frames = frames.to_string();
    let mut args = vec!["gen", "--out", s(dir), "--frames", &frames];
    args.extend_from_slice(extra);
    let out = tipdetect(&args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn records(path: &Path) -> Vec<Value> {
    fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn detects_generated_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen(&corpus, 10, &["--fingers", "2", "--orientation", "right"]);
    let out_path = dir.path().join("out.jsonl");
    let out = tipdetect(&["--input", s(&corpus), "--output", s(&out_path)], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let recs = records(&out_path);
    assert_eq!(recs.len(), 10);
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r["frame"], format!("frame_{i:05}.ppm"));
        assert_eq!(r["status"], "ok");
        assert_eq!(r["wrist_side"], "left");
        assert_eq!(r["finger_side"], "right");
        assert_eq!(r["fingertips"].as_array().unwrap().len(), 2);
        assert!(r["timings_us"]["total"].is_u64());
    }

    let truth = fs::read_to_string(corpus.join("ground_truth.jsonl")).unwrap();
    assert_eq!(truth.lines().count(), 10);
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = tipdetect(&["--input", s(&dir.path().join("nope")), "--output", s(&dir.path().join("o.jsonl"))], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tipdetect(&["--output", "o.jsonl"], None).status.code(), Some(2));
    assert_eq!(
        tipdetect(&["--input", ".", "--output", "o.jsonl", "--smooth-kernel", "4"], None).status.code(),
        Some(2)
    );
    assert_eq!(tipdetect(&["--bogus"], None).status.code(), Some(2));
}

#[test]
fn unreadable_frame_exits_one_but_keeps_others() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen(&corpus, 3, &[]);
    fs::write(corpus.join("frame_00001.ppm"), b"P6\n4 4\n255\n\x00").unwrap();
    let out_path = dir.path().join("out.jsonl");
    let out = tipdetect(&["--input", s(&corpus), "--output", s(&out_path), "--jobs", "2"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frame_00001.ppm"));
    let frames: Vec<_> = records(&out_path).iter().map(|r| r["frame"].as_str().unwrap().to_string()).collect();
    assert_eq!(frames, ["frame_00000.ppm", "frame_00002.ppm"]);
}

#[test]
fn overlay_and_no_timings() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen(&corpus, 2, &[]);
    let overlay = dir.path().join("overlay");
    let out_path = dir.path().join("out.jsonl");
    let out =
        tipdetect(&["--input", s(&corpus), "--output", s(&out_path), "--overlay", s(&overlay), "--no-timings"], None);
    assert!(out.status.success());
    for name in ["frame_00000.ppm", "frame_00001.ppm"] {
        let img = tipdetect::io::read_frame(&overlay.join(name)).unwrap();
        assert_eq!((img.width(), img.height()), (640, 480));
    }
    assert!(records(&out_path).iter().all(|r| r["timings_us"].is_null()));
}

#[test]
fn single_file_input_and_no_crop() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen(&corpus, 1, &[]);
    let out_path = dir.path().join("out.jsonl");
    let frame = corpus.join("frame_00000.ppm");
    let out = tipdetect(&["--input", s(&frame), "--output", s(&out_path), "--no-crop"], None);
    assert!(out.status.success());
    let recs = records(&out_path);
    assert_eq!(recs.len(), 1);
    assert!(recs[0]["crop"].is_null());
    assert!(recs[0]["timings_us"]["crop"].is_null());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen(&corpus, 1, &[]);
    let config = dir.path().join("td.conf");
    // An empty hue band rejects every pixel.
    fs::write(&config, "# narrow\nhue_min = 300\nhue-max = 301\n").unwrap();
    let out_path = dir.path().join("out.jsonl");

    let with_file = tipdetect(&["--input", s(&corpus), "--output", s(&out_path)], Some(&config));
    assert!(with_file.status.success());
    assert_eq!(records(&out_path)[0]["status"], "no_hand");

    let args = ["--input", s(&corpus), "--output", s(&out_path), "--hue-min", "0", "--hue-max", "50"];
    let overridden = tipdetect(&args, Some(&config));
    assert!(overridden.status.success());
    assert_eq!(records(&out_path)[0]["status"], "ok");

    fs::write(&config, "no_such_key = 1\n").unwrap();
    assert_eq!(tipdetect(&args, Some(&config)).status.code(), Some(2));
    let missing = dir.path().join("missing.conf");
    assert_eq!(tipdetect(&args, Some(&missing)).status.code(), Some(1));
}

#[test]
fn bench_prints_both_passes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen(&corpus, 3, &["--fingers", "5"]);
    let out_path = dir.path().join("out.jsonl");
    let out = tipdetect(&["--input", s(&corpus), "--output", s(&out_path), "--bench"], None);
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("frames: 3"), "{report}");
    assert!(report.contains("latency (crop enabled)"));
    assert!(report.contains("latency (crop disabled)"));
    assert!(report.contains("median tip-stage pixel reduction"));
}

#[test]
fn gen_validates_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(dir.path());
    assert_eq!(tipdetect(&["gen", "--out", o, "--fingers", "6"], None).status.code(), Some(2));
    assert_eq!(tipdetect(&["gen", "--out", o, "--noise", "1.5"], None).status.code(), Some(2));
    assert_eq!(tipdetect(&["gen", "--out", o, "--orientation", "sideways"], None).status.code(), Some(2));
}
