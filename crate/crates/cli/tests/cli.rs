use std::path::Path;
use std::process::{Command, Output};

fn curate(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curate"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "status {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status,
        stdout(o),
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn synthetic_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&curate(d, &["synth", "--output", ".", "--docs", "600", "--train-models"]));
    assert!(d.join("pipeline.toml").exists());

    let run = curate(d, &["--config", "pipeline.toml", "run"]);
    ok(&run);
    assert!(stdout(&run).contains("removal ratio"));
    for f in ["report.json", "report.txt", "throughput.json", "shard-00000.jsonl"] {
        assert!(d.join("out").join(f).exists(), "{f}");
    }

    // stopping early is not a success
    let stopped = curate(d, &["--config", "pipeline.toml", "run", "--output", "out2", "--stop-after", "langid"]);
    assert_eq!(stopped.status.code(), Some(2));
    assert!(!d.join("out2").join("report.json").exists());
    ok(&curate(d, &["--config", "pipeline.toml", "--resume", "run", "--output", "out2"]));
    assert_eq!(std::fs::read(d.join("out/report.json")).unwrap(), std::fs::read(d.join("out2/report.json")).unwrap());

    // one step at a time
    ok(&curate(d, &["--config", "pipeline.toml", "filter"]));
    ok(&curate(d, &["--config", "pipeline.toml", "score", "--input", "out/filter"]));
    ok(&curate(d, &["--config", "pipeline.toml", "cluster", "--input", "out/score"]));
    ok(&curate(d, &["--config", "pipeline.toml", "dedup", "--input", "out/cluster"]));
    ok(&curate(d, &["--config", "pipeline.toml", "sample", "--input", "out/dedup"]));
    let stepped = std::fs::read_to_string(d.join("out/sample/report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&stepped).unwrap();
    assert!(v["docs"].as_u64().unwrap() > 0);

    let ids = curate(d, &["--config", "pipeline.toml", "tokenize", "--text", "2023"]);
    ok(&ids);
    let ids: Vec<u32> = serde_json::from_str(stdout(&ids).trim()).unwrap();
    assert_eq!(ids.len(), 4);
    let joined: Vec<String> = ids.iter().map(u32::to_string).collect();
    let back = curate(d, &["--config", "pipeline.toml", "tokenize", "--decode", &joined.join(",")]);
    ok(&back);
    assert_eq!(stdout(&back).trim_end_matches('\n'), "2023");

    ok(&curate(d, &["--config", "pipeline.toml", "tokenize", "--input", "out", "--output", "tok.bin"]));
    ok(&curate(d, &["pack", "--tokens", "tok.bin", "--output", "packed.bin", "--seq-len", "512"]));
    assert!(d.join("packed.bin").exists());
    ok(&curate(
        d,
        &[
            "--config",
            "pipeline.toml",
            "haystack",
            "--tokens",
            "tok.bin",
            "--output",
            "hay",
            "--lengths",
            "1024,2048",
            "--depths",
            "0,0.5,1",
        ],
    ));
    let manifest = std::fs::read_to_string(d.join("hay/haystack.jsonl")).unwrap();
    assert_eq!(manifest.lines().count(), 6);

    let rep = curate(d, &["--config", "pipeline.toml", "report", "--input", "out", "--output", "mix"]);
    ok(&rep);
    assert!(stdout(&rep).contains("by topic"));
    assert!(d.join("mix/mixture.json").exists() && d.join("mix/mixture.txt").exists());
}

#[test]
fn ingest_and_train_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let wet = "WARC/1.0\r\nWARC-Type: conversion\r\nWARC-Target-URI: https://example.com/a\r\n\
WARC-Record-ID: <urn:uuid:1>\r\nContent-Length: 23\r\n\r\nhello world, this is a\n\r\n\r\n";
    std::fs::write(d.join("a.wet"), wet).unwrap();
    let o = curate(d, &["--shards", "2", "ingest", "--input", "a.wet", "--output", "shards"]);
    ok(&o);
    assert!(stdout(&o).contains("ingested 1 documents"), "{}", stdout(&o));

    ok(&curate(d, &["synth", "--output", "q", "--kind", "quality", "--docs", "200"]));
    ok(&curate(
        d,
        &[
            "train",
            "classifier",
            "--positives",
            "q/positives",
            "--negatives",
            "q/negatives",
            "--output",
            "quality.json",
        ],
    ));
    assert!(d.join("quality.json").exists());
    ok(&curate(d, &["tokenize-train", "--input", "q/positives", "--output", "tok.json", "--vocab-size", "600"]));
    assert!(d.join("tok.json").exists());
}

#[test]
fn failures_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // no output configured
    assert_eq!(curate(d, &["run"]).status.code(), Some(1));
    std::fs::write(d.join("bad.toml"), "input = [\"in\"]\noutput = \"out\"\n[[stages]]\nkind = \"nope\"\n").unwrap();
    let o = curate(d, &["--config", "bad.toml", "run"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
    assert!(!curate(d, &["no-such-command"]).status.success());
}
