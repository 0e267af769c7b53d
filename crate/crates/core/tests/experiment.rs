use std::fs;

use driftbag::experiment::{run_experiment, ExperimentConfig, ExperimentError, Summary};
use driftbag::ClassifierKind;

fn config(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        scenarios: vec!["StaticIm10".into()],
        classifiers: vec![ClassifierKind::Ob],
        seeds: vec![1],
        stream_length: 5_000,
        output_dir: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn smoke_run_writes_series_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(dir.path())).unwrap();
    let series = dir.path().join("series/StaticIm10__ob__seed1.csv");
    let csv = fs::read_to_string(series).unwrap();
    assert!(csv.starts_with("index,recall_min,recall_maj,gmean\n"));
    assert_eq!(csv.lines().count(), 1 + 5_000 / 100);
    let summary: Summary = serde_json::from_str(&fs::read_to_string(&out.summary_path).unwrap()).unwrap();
    assert_eq!(summary.runs.len(), 1);
    assert_eq!(summary.averages.len(), 1);
    assert_eq!(summary.runs[0].examples, 5_000);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mk = |d: &std::path::Path| ExperimentConfig {
        scenarios: vec!["Rare40".into(), "StaticIm5".into()],
        classifiers: vec![ClassifierKind::Ob, ClassifierKind::Noob, ClassifierKind::Hnob],
        seeds: vec![1, 2],
        stream_length: 3_000,
        ..config(d)
    };
    run_experiment(&mk(a.path())).unwrap();
    run_experiment(&mk(b.path())).unwrap();
    for f in ["summary.json", "ranks.json", "series/Rare40__hnob__seed2.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bad_scenario_maps_to_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let c = ExperimentConfig {
        scenarios: vec!["Borderline140".into()],
        ..config(dir.path())
    };
    let err = run_experiment(&c).unwrap_err();
    assert!(matches!(err, ExperimentError::Scenario(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn unwritable_output_maps_to_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let err = run_experiment(&config(&blocker.join("out"))).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
