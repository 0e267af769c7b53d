use serde::{Deserialize, Serialize};

use super::labeler::{type_histogram, TypeHistogram, LABELER_K};
use super::scenario::ScenarioSpec;
use super::GeneratorState;
use crate::error::ScenarioError;
use crate::stream::ClassLabel;

pub const MIN_VALIDATION_SAMPLE: usize = 2_000;
/// Allowed gap between realized and specified type shares.
pub const TYPE_TOLERANCE: f64 = 0.10;
/// Allowed gap between realized and specified minority fraction.
pub const IMBALANCE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: String,
    pub sample_size: usize,
    pub expected_imbalance: f64,
    pub realized_imbalance: f64,
    /// Specified `(safe, borderline, rare)` shares.
    pub expected_types: (f64, f64, f64),
    /// Realized `(safe, borderline, rare + outlier)` shares among minority examples.
    pub realized_types: (f64, f64, f64),
    pub histogram: TypeHistogram,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub scenario: String,
    pub phases: Vec<PhaseReport>,
    pub pass: bool,
}

fn phase(spec: &ScenarioSpec, name: &str, progress: f64, sample_size: usize) -> Result<PhaseReport, ScenarioError> {
    let frozen = spec.clone().with_length(sample_size as u64);
    let sample: Vec<_> = GeneratorState::frozen_at(frozen, progress).collect();
    let params = spec.params_at(progress);
    let minority = sample.iter().filter(|x| x.label == ClassLabel::Minority).count();
    let realized_imbalance = minority as f64 / sample.len() as f64;
    let histogram = type_histogram(&sample, ClassLabel::Minority, LABELER_K)
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let realized_types = histogram.shares();
    let p = params.profile;
    let expected_types = (p.safe, p.borderline, p.rare);
    let types_ok = [
        (realized_types.0, expected_types.0),
        (realized_types.1, expected_types.1),
        (realized_types.2, expected_types.2),
    ]
    .iter()
    .all(|(r, e)| (r - e).abs() <= TYPE_TOLERANCE + 1e-12);
    let imbalance_ok = (realized_imbalance - params.imbalance).abs() <= IMBALANCE_TOLERANCE + 1e-12;
    Ok(PhaseReport {
        phase: name.to_string(),
        sample_size,
        expected_imbalance: params.imbalance,
        realized_imbalance,
        expected_types,
        realized_types,
        histogram,
        pass: types_ok && imbalance_ok && histogram.total() > 0,
    })
}

/// Samples the stationary pre-drift and post-drift regimes of `spec` and
/// checks realized class ratio and labeled type shares against the spec.
pub fn validate_scenario(spec: &ScenarioSpec, sample_size: usize) -> Result<ValidationReport, ScenarioError> {
    if sample_size < MIN_VALIDATION_SAMPLE {
        return Err(ScenarioError::Invalid(format!(
            "validation needs at least {MIN_VALIDATION_SAMPLE} examples per phase, got {sample_size}"
        )));
    }
    let phases = vec![
        phase(spec, "pre-drift", 0.0, sample_size)?,
        phase(spec, "post-drift", 1.0, sample_size)?,
    ];
    Ok(ValidationReport {
        scenario: spec.name.clone(),
        pass: phases.iter().all(|p| p.pass),
        phases,
    })
}
