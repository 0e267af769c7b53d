//! Prequential (test-then-train) evaluation with per-class recall and G-mean.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::ensemble::StreamClassifier;
use crate::stream::{ClassLabel, Example};

/// Plot series window, in examples.
pub const SERIES_WINDOW: usize = 500;
/// Plot series sampling period, in examples.
pub const SERIES_EVERY: usize = 100;

pub fn gmean(recall_min: f64, recall_maj: f64) -> f64 {
    (recall_min * recall_maj).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorMode {
    Cumulative,
    Decayed(f64),
    Windowed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrequentialRecord {
    pub index: u64,
    pub recall_min: f64,
    pub recall_maj: f64,
    pub gmean: f64,
}

/// Per-class hit/miss cells: `[minority, majority]`.
#[derive(Debug, Clone)]
pub struct ConfusionState {
    mode: EstimatorMode,
    hits: [f64; 2],
    misses: [f64; 2],
    outcomes: VecDeque<(ClassLabel, bool)>,
}

impl ConfusionState {
    pub fn new(mode: EstimatorMode) -> Self {
        match mode {
            EstimatorMode::Decayed(f) => assert!(f > 0.0 && f <= 1.0, "decay factor must lie in (0, 1]"),
            EstimatorMode::Windowed(n) => assert!(n > 0, "window must be positive"),
            EstimatorMode::Cumulative => {}
        }
        ConfusionState {
            mode,
            hits: [0.0; 2],
            misses: [0.0; 2],
            outcomes: VecDeque::new(),
        }
    }

    pub fn cumulative() -> Self {
        Self::new(EstimatorMode::Cumulative)
    }

    pub fn decayed(factor: f64) -> Self {
        Self::new(EstimatorMode::Decayed(factor))
    }

    pub fn windowed(size: usize) -> Self {
        Self::new(EstimatorMode::Windowed(size))
    }

    pub fn mode(&self) -> EstimatorMode {
        self.mode
    }

    /// Correctly predicted examples of `class`.
    pub fn tp(&self, class: ClassLabel) -> f64 {
        self.hits[class.index()]
    }

    /// Misclassified examples of `class`.
    pub fn fn_(&self, class: ClassLabel) -> f64 {
        self.misses[class.index()]
    }

    pub fn from_cells(tp_min: f64, fn_min: f64, tp_maj: f64, fn_maj: f64) -> Self {
        let mut s = Self::cumulative();
        s.hits = [tp_min, tp_maj];
        s.misses = [fn_min, fn_maj];
        s
    }

    pub fn update(&mut self, prediction: ClassLabel, truth: ClassLabel) {
        let correct = prediction == truth;
        match self.mode {
            EstimatorMode::Cumulative => {}
            EstimatorMode::Decayed(f) => {
                for cell in self.hits.iter_mut().chain(self.misses.iter_mut()) {
                    *cell *= f;
                }
            }
            EstimatorMode::Windowed(size) => {
                self.outcomes.push_back((truth, correct));
                if self.outcomes.len() > size {
                    let (old, ok) = self.outcomes.pop_front().expect("non-empty");
                    self.cell(old, ok, -1.0);
                }
            }
        }
        self.cell(truth, correct, 1.0);
    }

    fn cell(&mut self, truth: ClassLabel, correct: bool, delta: f64) {
        let cells = if correct { &mut self.hits } else { &mut self.misses };
        cells[truth.index()] += delta;
    }

    /// `tp / (tp + fn)` for `class`; 0 while the class is unseen.
    pub fn recall(&self, class: ClassLabel) -> f64 {
        let tp = self.tp(class);
        let total = tp + self.fn_(class);
        if total <= 0.0 {
            0.0
        } else {
            tp / total
        }
    }

    pub fn record(&self, index: u64) -> PrequentialRecord {
        let recall_min = self.recall(ClassLabel::Minority);
        let recall_maj = self.recall(ClassLabel::Majority);
        PrequentialRecord {
            index,
            recall_min,
            recall_maj,
            gmean: gmean(recall_min, recall_maj),
        }
    }

    /// Updates with one outcome and returns the resulting record.
    pub fn step(&mut self, index: u64, prediction: ClassLabel, truth: ClassLabel) -> PrequentialRecord {
        self.update(prediction, truth);
        self.record(index)
    }
}

/// Final cumulative scores plus the sampled windowed series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PrequentialResult {
    pub examples: u64,
    pub final_record: PrequentialRecord,
    pub series: Vec<PrequentialRecord>,
}

/// Runs `classifier` test-then-train over `stream`.
pub fn run_prequential<I>(classifier: &mut dyn StreamClassifier, stream: I) -> PrequentialResult
where
    I: IntoIterator<Item = Example>,
{
    let mut total = ConfusionState::cumulative();
    let mut recent = ConfusionState::windowed(SERIES_WINDOW);
    let mut series = Vec::new();
    let mut seen = 0u64;
    for x in stream {
        let prediction = classifier.process(&x);
        total.update(prediction, x.label);
        recent.update(prediction, x.label);
        seen += 1;
        if seen.is_multiple_of(SERIES_EVERY as u64) {
            series.push(recent.record(x.index));
        }
    }
    PrequentialResult {
        examples: seen,
        final_record: total.record(seen.saturating_sub(1)),
        series,
    }
}

/// Series CSV with header `index,recall_min,recall_maj,gmean`.
pub fn series_csv(series: &[PrequentialRecord]) -> String {
    let mut out = String::from("index,recall_min,recall_maj,gmean\n");
    for r in series {
        out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", r.index, r.recall_min, r.recall_maj, r.gmean));
    }
    out
}
