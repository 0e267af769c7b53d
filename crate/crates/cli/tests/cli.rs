use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn driftbag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftbag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &format!(
            "scenarios = [\"StaticIm10\"]\nclassifiers = [\"ob\"]\nseeds = [1]\nstream_length = 5000\noutput_dir = {:?}\n",
            out.to_str().unwrap()
        ),
    );
    let r = driftbag(&["run", &cfg]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("series/StaticIm10__ob__seed1.csv").is_file());
    assert!(out.join("summary.json").is_file());
    assert!(out.join("ranks.json").is_file());
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenarios = [\"Rare40\"]\nclassifiers = [\"ob\"]\nseeds = [9]\n");
    let out = dir.path().join("elsewhere");
    let r = driftbag(&[
        "run",
        &cfg,
        "--scenario",
        "StaticIm5",
        "--classifier",
        "noob",
        "--classifier",
        "oob",
        "--seed",
        "3",
        "--length",
        "2000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    let runs = summary["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r["scenario"] == "StaticIm5" && r["seed"] == 3 && r["examples"] == 2000));
}

#[test]
fn invalid_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenarios = [\"Split11\"]\n");
    let r = driftbag(&["run", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("Split11"));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let cfg = write_config(dir.path(), "scenarios = [\"StaticIm10\"]\nclassifiers = [\"ob\"]\nseeds = [1]\nstream_length = 500\n");
    let r = driftbag(&["run", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn gen_dumps_the_stream() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stream.csv");
    let r = driftbag(&["gen", "Split3+Rare40", "--length", "300", "--seed", "4", "--dump-stream", path.to_str().unwrap()]);
    assert!(r.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 301);
    assert!(text.starts_with("f1,f2,f3,f4,f5,label,index\n"));
    let again = dir.path().join("again.csv");
    driftbag(&["gen", "Split3+Rare40", "--length", "300", "--seed", "4", "--dump-stream", again.to_str().unwrap()]);
    assert_eq!(text, fs::read_to_string(again).unwrap());
}

#[test]
fn validate_reports_json() {
    let r = driftbag(&["validate", "Borderline60"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let report: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["phases"].as_array().unwrap().len(), 2);
    assert_eq!(driftbag(&["validate", "Rare0"]).status.code(), Some(2));
}

#[test]
fn ranks_merge_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let mut summaries = Vec::new();
    for (i, scenario) in ["Rare60", "Borderline60"].iter().enumerate() {
        let out = dir.path().join(format!("s{i}"));
        let cfg = write_config(
            dir.path(),
            &format!(
                "scenarios = [{scenario:?}]\nclassifiers = [\"ob\", \"oob\"]\nseeds = [1, 2]\nstream_length = 2000\noutput_dir = {:?}\nwrite_series = false\n",
                out.to_str().unwrap()
            ),
        );
        assert!(driftbag(&["run", &cfg]).status.success());
        summaries.push(out.join("summary.json").to_str().unwrap().to_string());
    }
    let mut args = vec!["ranks"];
    args.extend(summaries.iter().map(String::as_str));
    let r = driftbag(&args);
    assert!(r.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    let all = reports
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["factors"] == "All" && r["metric"] == "gmean")
        .unwrap();
    assert_eq!(all["n"], 4);
    assert_eq!(driftbag(&["ranks", "/nonexistent/summary.json"]).status.code(), Some(2));
}
