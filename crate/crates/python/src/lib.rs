//! Python bindings: scenarios and generated streams, the six classifiers,
//! prequential runs, rate formulas, the example-type labeler and rank
//! statistics.

use driftbag::ensemble::{self, ClassifierKind, EnsembleConfig, StreamClassifier};
use driftbag::error::ScenarioError;
use driftbag::evaluation::run_prequential;
use driftbag::experiment::{run_experiment as run_config, ExperimentConfig};
use driftbag::generator::{self, ExampleType};
use driftbag::stats;
use driftbag::stream::{ClassLabel, DecayedClassSizes, Example};
use driftbag::{parse_scenario as parse, GeneratorState};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn label_of(s: &str) -> PyResult<ClassLabel> {
    ClassLabel::parse(s).ok_or_else(|| value_error(format!("label must be \"min\" or \"maj\", got {s:?}")))
}

fn kind_of(s: &str) -> PyResult<ClassifierKind> {
    s.parse().map_err(value_error)
}

fn spec_of(name: &str, length: u64, seed: u64) -> PyResult<driftbag::ScenarioSpec> {
    Ok(parse(name)
        .map_err(|e: ScenarioError| value_error(e))?
        .with_length(length)
        .with_seed(seed))
}

/// Serializable value to native Python objects via JSON.
fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// Parsed scenario parameters as a dict.
#[pyfunction]
fn parse_scenario<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = parse(name).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("name", &s.name)?;
    d.set_item("category", s.category())?;
    d.set_item("length", s.length)?;
    d.set_item("dimensions", s.dimensions)?;
    d.set_item("imbalance_start", s.imbalance_start)?;
    d.set_item("imbalance_end", s.imbalance_end)?;
    d.set_item("profile_start", (s.profile_start.safe, s.profile_start.borderline, s.profile_start.rare))?;
    d.set_item("profile_end", (s.profile_end.safe, s.profile_end.borderline, s.profile_end.rare))?;
    d.set_item("subclusters_start", s.subclusters_start)?;
    d.set_item("subclusters_end", s.subclusters_end)?;
    d.set_item("drift_window", s.drift_window)?;
    Ok(d)
}

/// Iterator over a generated stream yielding `(features, label, index)`.
#[pyclass]
struct Generator {
    state: GeneratorState,
}

#[pymethods]
impl Generator {
    #[new]
    #[pyo3(signature = (scenario, length = 50_000, seed = 1))]
    fn new(scenario: &str, length: u64, seed: u64) -> PyResult<Self> {
        Ok(Generator {
            state: GeneratorState::new(spec_of(scenario, length, seed)?),
        })
    }

    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> Option<(Vec<f64>, &'static str, u64)> {
        self.state.next_example().map(|x| (x.features, x.label.as_str(), x.index))
    }

    /// Up to `n` further examples.
    fn take(&mut self, n: usize) -> Vec<(Vec<f64>, &'static str, u64)> {
        (&mut self.state)
            .take(n)
            .map(|x| (x.features, x.label.as_str(), x.index))
            .collect()
    }
}

/// One of `ob`, `oob`, `uob`, `noob`, `nuob`, `hnob`.
#[pyclass(unsendable)]
struct Classifier {
    kind: ClassifierKind,
    model: Box<dyn StreamClassifier>,
    seen: u64,
}

#[pymethods]
impl Classifier {
    #[new]
    #[pyo3(signature = (kind, seed = 1, ensemble_size = 15, k = 5, window = 500, psi = 2.0, theta = 0.9))]
    fn new(kind: &str, seed: u64, ensemble_size: usize, k: usize, window: usize, psi: f64, theta: f64) -> PyResult<Self> {
        let theta_ok = theta > 0.0 && theta < 1.0;
        let psi_ok = psi > 0.0 && psi.is_finite();
        if ensemble_size == 0 || k == 0 || window == 0 || !theta_ok || !psi_ok {
            return Err(value_error("ensemble_size, k, window and psi must be positive and theta in (0, 1)"));
        }
        let kind = kind_of(kind)?;
        let config = EnsembleConfig {
            ensemble_size,
            k,
            window,
            psi,
            theta,
            ..EnsembleConfig::default()
        };
        Ok(Classifier {
            kind,
            model: ensemble::build_classifier(kind, &config, seed),
            seen: 0,
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.kind.as_str()
    }

    fn predict(&self, features: Vec<f64>) -> &'static str {
        self.model.predict(&Example::new(features, ClassLabel::Majority, self.seen)).as_str()
    }

    /// Test-then-train on one labeled example; returns the prediction made
    /// before training.
    fn process(&mut self, features: Vec<f64>, label: &str) -> PyResult<&'static str> {
        let x = Example::new(features, label_of(label)?, self.seen);
        self.seen += 1;
        Ok(self.model.process(&x).as_str())
    }
}

/// Prequential run of one classifier over one generated stream.
#[pyfunction]
#[pyo3(signature = (classifier, scenario, length = 50_000, seed = 1))]
fn prequential(py: Python<'_>, classifier: &str, scenario: &str, length: u64, seed: u64) -> PyResult<Py<PyAny>> {
    let kind = kind_of(classifier)?;
    let spec = spec_of(scenario, length, seed)?;
    let result = py.detach(|| {
        let mut model = ensemble::build_classifier(kind, &EnsembleConfig::default(), seed);
        run_prequential(model.as_mut(), GeneratorState::new(spec))
    });
    let d = PyDict::new(py);
    d.set_item("examples", result.examples)?;
    d.set_item("final", to_py(py, &result.final_record)?)?;
    d.set_item("series", to_py(py, &result.series)?)?;
    Ok(d.into_any().unbind())
}

/// Runs an experiment described by TOML text and returns its summary.
#[pyfunction]
fn run_experiment(py: Python<'_>, config_toml: &str) -> PyResult<Py<PyAny>> {
    let config = ExperimentConfig::from_toml(config_toml).map_err(value_error)?;
    let outcome = py
        .detach(|| run_config(&config))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &outcome.summary)
}

/// Realized class ratio and example-type shares before and after drift.
#[pyfunction]
#[pyo3(signature = (scenario, sample = 5_000, seed = 1))]
fn validate_scenario(py: Python<'_>, scenario: &str, sample: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let spec = parse(scenario).map_err(value_error)?.with_seed(seed);
    let report = generator::validate_scenario(&spec, sample).map_err(value_error)?;
    to_py(py, &report)
}

/// Type of an example given a labeled sample that does not contain it.
#[pyfunction]
#[pyo3(signature = (features, label, sample, k = 5))]
fn label_example_type(features: Vec<f64>, label: &str, sample: Vec<(Vec<f64>, String)>, k: usize) -> PyResult<&'static str> {
    let x = Example::new(features, label_of(label)?, u64::MAX);
    let sample = sample
        .into_iter()
        .enumerate()
        .map(|(i, (f, l))| Ok(Example::new(f, label_of(&l)?, i as u64)))
        .collect::<PyResult<Vec<_>>>()?;
    let t = generator::label_example_type(&x, &sample, k).map_err(value_error)?;
    Ok(match t {
        ExampleType::Safe => "safe",
        ExampleType::Borderline => "borderline",
        ExampleType::Rare => "rare",
        ExampleType::Outlier => "outlier",
    })
}

#[pyfunction]
fn lambda_oob(size_majority: f64, size_minority: f64, label: &str) -> PyResult<f64> {
    let s = DecayedClassSizes::with_sizes(0.9, size_majority, size_minority);
    Ok(ensemble::lambda_oob(&s, label_of(label)?))
}

#[pyfunction]
fn lambda_uob(size_majority: f64, size_minority: f64, label: &str) -> PyResult<f64> {
    let s = DecayedClassSizes::with_sizes(0.9, size_majority, size_minority);
    Ok(ensemble::lambda_uob(&s, label_of(label)?))
}

#[pyfunction]
#[pyo3(signature = (n_majority, n_minority, majority_neighbours, k = 5, psi = 2.0, label = "min"))]
fn lambda_noob(n_majority: usize, n_minority: usize, majority_neighbours: usize, k: usize, psi: f64, label: &str) -> PyResult<f64> {
    let level = ensemble::unsafeness_level_min(majority_neighbours.min(k), k, psi);
    Ok(ensemble::lambda_noob((n_majority, n_minority), level, label_of(label)?))
}

#[pyfunction]
#[pyo3(signature = (n_majority, n_minority, majority_neighbours, k = 5, psi = 2.0, label = "maj"))]
fn lambda_nuob(n_majority: usize, n_minority: usize, majority_neighbours: usize, k: usize, psi: f64, label: &str) -> PyResult<f64> {
    let level = ensemble::safeness_level_maj(majority_neighbours.min(k), k);
    Ok(ensemble::lambda_nuob((n_majority, n_minority), level, psi, label_of(label)?))
}

#[pyfunction]
fn friedman_ranks(rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    stats::friedman_ranks(&rows).map_err(value_error)
}

#[pyfunction]
fn friedman_statistic(average_ranks: Vec<f64>, n: usize) -> f64 {
    stats::friedman_statistic(&average_ranks, n)
}

#[pyfunction]
fn nemenyi_cd(k: usize, n: usize) -> PyResult<f64> {
    stats::nemenyi_cd(k, n).map_err(value_error)
}

#[pymodule]
fn driftbag_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Generator>()?;
    m.add_class::<Classifier>()?;
    m.add_function(wrap_pyfunction!(parse_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(prequential, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(validate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(label_example_type, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_oob, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_uob, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_noob, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_nuob, m)?)?;
    m.add_function(wrap_pyfunction!(friedman_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(friedman_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(nemenyi_cd, m)?)?;
    m.add("CLASSIFIERS", ClassifierKind::ALL.iter().map(|k| k.as_str()).collect::<Vec<_>>())?;
    Ok(())
}
