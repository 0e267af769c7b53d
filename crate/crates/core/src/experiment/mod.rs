//! Seeded experiment runner: streams x classifiers x seeds, run in parallel,
//! merged in a fixed order so outputs depend only on the configuration.

mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{build_classifier, ClassifierKind, EnsembleConfig};
use crate::error::ScenarioError;
use crate::evaluation::{run_prequential, series_csv};
use crate::generator::{parse_scenario, GeneratorState};
use crate::stats::{rank_report, RankReport, ScoreMatrix};

pub use config::ExperimentConfig;

/// Caps the worker pool when set.
pub const THREADS_ENV: &str = "DRIFTBAG_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("run {run} failed: {message}")]
    RunFailed { run: String, message: String },
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Scenario(_) => 2,
            ExperimentError::Output { .. } => 3,
            ExperimentError::RunFailed { .. } => 1,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|source| ExperimentError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Final cumulative scores of one (scenario, classifier, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub category: String,
    pub classifier: ClassifierKind,
    pub seed: u64,
    pub examples: u64,
    pub recall_min: f64,
    pub recall_maj: f64,
    pub gmean: f64,
}

impl RunRecord {
    pub fn id(&self) -> String {
        run_id(&self.scenario, self.classifier, self.seed)
    }
}

fn run_id(scenario: &str, classifier: ClassifierKind, seed: u64) -> String {
    format!("{scenario}__{classifier}__seed{seed}")
}

/// Seed-averaged scores of one (scenario, classifier) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRecord {
    pub scenario: String,
    pub classifier: ClassifierKind,
    pub seeds: usize,
    pub recall_min: f64,
    pub recall_maj: f64,
    pub gmean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub stream_length: u64,
    pub ensemble_size: usize,
    pub k: usize,
    pub window: usize,
    pub psi: f64,
    pub theta: f64,
    pub runs: Vec<RunRecord>,
    pub averages: Vec<AverageRecord>,
}

impl Summary {
    pub fn from_runs(config: &ExperimentConfig, runs: Vec<RunRecord>) -> Self {
        Summary {
            stream_length: config.stream_length,
            ensemble_size: config.ensemble_size,
            k: config.k,
            window: config.window,
            psi: config.psi,
            theta: config.theta,
            averages: averages(&runs),
            runs,
        }
    }

    pub fn average(&self, scenario: &str, classifier: ClassifierKind) -> Option<&AverageRecord> {
        self.averages
            .iter()
            .find(|a| a.scenario == scenario && a.classifier == classifier)
    }
}

pub fn averages(runs: &[RunRecord]) -> Vec<AverageRecord> {
    let mut groups: BTreeMap<(String, ClassifierKind), Vec<&RunRecord>> = BTreeMap::new();
    for r in runs {
        groups.entry((r.scenario.clone(), r.classifier)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((scenario, classifier), rs)| {
            let n = rs.len() as f64;
            let mean = |f: fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            AverageRecord {
                scenario,
                classifier,
                seeds: rs.len(),
                recall_min: mean(|r| r.recall_min),
                recall_maj: mean(|r| r.recall_maj),
                gmean: mean(|r| r.gmean),
            }
        })
        .collect()
}

/// Metrics ranked in `ranks.json`.
pub const RANKED_METRICS: [&str; 2] = ["gmean", "recall_min"];

fn metric_value(r: &RunRecord, metric: &str) -> f64 {
    match metric {
        "gmean" => r.gmean,
        "recall_min" => r.recall_min,
        "recall_maj" => r.recall_maj,
        other => panic!("unknown metric {other}"),
    }
}

/// Friedman ranks over the runs of `classifiers` in the given scenarios; each
/// (scenario, seed) stream with a result for every classifier is one dataset.
pub fn rank_runs(
    runs: &[RunRecord],
    classifiers: &[ClassifierKind],
    metric: &str,
    factors: &str,
    scenario_filter: impl Fn(&RunRecord) -> bool,
) -> Option<RankReport> {
    let mut cells: BTreeMap<(String, u64), BTreeMap<ClassifierKind, f64>> = BTreeMap::new();
    for r in runs.iter().filter(|r| scenario_filter(r) && classifiers.contains(&r.classifier)) {
        cells
            .entry((r.scenario.clone(), r.seed))
            .or_default()
            .insert(r.classifier, metric_value(r, metric));
    }
    let rows: Vec<Vec<f64>> = cells
        .values()
        .filter(|row| row.len() == classifiers.len())
        .map(|row| classifiers.iter().map(|c| row[c]).collect())
        .collect();
    if rows.is_empty() || classifiers.len() < 2 {
        return None;
    }
    let names = classifiers.iter().map(|c| c.as_str().to_string()).collect();
    let matrix = ScoreMatrix::new(names, rows).ok()?;
    rank_report(metric, factors, &matrix).ok()
}

/// One report per (factor category, metric), plus `All` over every run.
pub fn rank_reports(runs: &[RunRecord]) -> Vec<RankReport> {
    let present: BTreeSet<ClassifierKind> = runs.iter().map(|r| r.classifier).collect();
    let classifiers: Vec<ClassifierKind> = ClassifierKind::ALL
        .into_iter()
        .filter(|c| present.contains(c))
        .collect();
    let categories: BTreeSet<String> = runs.iter().map(|r| r.category.clone()).collect();
    let mut reports = Vec::new();
    for metric in RANKED_METRICS {
        for cat in &categories {
            reports.extend(rank_runs(runs, &classifiers, metric, cat, |r| &r.category == cat));
        }
        reports.extend(rank_runs(runs, &classifiers, metric, "All", |_| true));
    }
    reports
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs one stream through one classifier and returns its final record and
/// plot series.
pub fn run_single(
    scenario: &str,
    classifier: ClassifierKind,
    seed: u64,
    length: u64,
    ensemble: &EnsembleConfig,
) -> Result<(RunRecord, String), ScenarioError> {
    let spec = parse_scenario(scenario)?.with_length(length).with_seed(seed);
    let category = spec.category();
    let mut model = build_classifier(classifier, ensemble, seed);
    let result = run_prequential(model.as_mut(), GeneratorState::new(spec));
    let f = result.final_record;
    let record = RunRecord {
        scenario: scenario.to_string(),
        category,
        classifier,
        seed,
        examples: result.examples,
        recall_min: f.recall_min,
        recall_maj: f.recall_maj,
        gmean: f.gmean,
    };
    Ok((record, series_csv(&result.series)))
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub summary: Summary,
    pub ranks: Vec<RankReport>,
    pub summary_path: PathBuf,
    pub ranks_path: PathBuf,
}

/// Runs every configured combination and writes `series/*.csv`,
/// `summary.json` and `ranks.json` under the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let out = &config.output_dir;
    let series_dir = out.join("series");
    fs::create_dir_all(&series_dir).map_err(|source| ExperimentError::Output {
        path: series_dir.clone(),
        source,
    })?;

    let mut jobs = Vec::new();
    for scenario in &config.scenarios {
        for &classifier in &config.classifiers {
            for &seed in &config.seeds {
                jobs.push((scenario.clone(), classifier, seed));
            }
        }
    }
    let ensemble = config.ensemble_config();
    let work = |(scenario, classifier, seed): &(String, ClassifierKind, u64)| -> Result<RunRecord, ExperimentError> {
        let id = run_id(scenario, *classifier, *seed);
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            run_single(scenario, *classifier, *seed, config.stream_length, &ensemble)
        }));
        let (record, csv) = match outcome {
            Ok(r) => r?,
            Err(panic) => {
                let message = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".to_string());
                return Err(ExperimentError::RunFailed { run: id, message });
            }
        };
        if config.write_series {
            write_file(&series_dir.join(format!("{id}.csv")), &csv)?;
        }
        Ok(record)
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<RunRecord, ExperimentError>> = pool.install(|| jobs.par_iter().map(work).collect());

    let mut runs = Vec::with_capacity(results.len());
    let mut first_error = None;
    for r in results {
        match r {
            Ok(rec) => runs.push(rec),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    runs.sort_by(|a, b| (&a.scenario, a.classifier, a.seed).cmp(&(&b.scenario, b.classifier, b.seed)));

    let summary = Summary::from_runs(config, runs);
    let ranks = rank_reports(&summary.runs);
    let summary_path = out.join("summary.json");
    let ranks_path = out.join("ranks.json");
    write_file(&summary_path, &to_json(&summary))?;
    write_file(&ranks_path, &to_json(&ranks))?;
    if let Some(e) = first_error {
        return Err(e);
    }
    Ok(ExperimentOutcome {
        summary,
        ranks,
        summary_path,
        ranks_path,
    })
}
