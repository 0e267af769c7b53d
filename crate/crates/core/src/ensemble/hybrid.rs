use crate::ensemble::{ClassifierKind, EnsembleConfig, EnsembleModel, StreamClassifier};
use crate::evaluation::ConfusionState;
use crate::stream::{ClassLabel, Example};

/// Per-example decay of the G-mean trackers that drive member selection.
pub const HYBRID_TRACKER_DECAY: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Active {
    Under,
    Over,
}

/// NUOB and NOOB trained side by side; the member with the higher decayed
/// prequential G-mean answers for the next example. Ties go to NUOB.
pub struct HybridModel {
    under: EnsembleModel,
    over: EnsembleModel,
    tracker_under: ConfusionState,
    tracker_over: ConfusionState,
    active: Active,
}

impl HybridModel {
    pub fn new(config: &EnsembleConfig, seed: u64) -> Self {
        HybridModel {
            under: EnsembleModel::new(ClassifierKind::Nuob, config, seed),
            over: EnsembleModel::new(ClassifierKind::Noob, config, seed),
            tracker_under: ConfusionState::decayed(HYBRID_TRACKER_DECAY),
            tracker_over: ConfusionState::decayed(HYBRID_TRACKER_DECAY),
            active: Active::Under,
        }
    }

    pub fn active(&self) -> Active {
        self.active
    }

    /// Current `(under, over)` tracker G-means.
    pub fn tracker_gmeans(&self) -> (f64, f64) {
        (
            self.tracker_under.record(0).gmean,
            self.tracker_over.record(0).gmean,
        )
    }

    pub fn under(&self) -> &EnsembleModel {
        &self.under
    }

    pub fn over(&self) -> &EnsembleModel {
        &self.over
    }

    pub fn select(under_gmean: f64, over_gmean: f64) -> Active {
        if over_gmean > under_gmean {
            Active::Over
        } else {
            Active::Under
        }
    }

    /// One step: answer with the active member, train both, update trackers,
    /// reselect. Returns `(hybrid, under, over)` predictions.
    pub fn process_traced(&mut self, x: &Example) -> (ClassLabel, ClassLabel, ClassLabel) {
        let under = self.under.process_example(x).prediction;
        let over = self.over.process_example(x).prediction;
        let chosen = match self.active {
            Active::Under => under,
            Active::Over => over,
        };
        self.tracker_under.update(under, x.label);
        self.tracker_over.update(over, x.label);
        let (gu, go) = self.tracker_gmeans();
        self.active = Self::select(gu, go);
        (chosen, under, over)
    }
}

impl StreamClassifier for HybridModel {
    fn predict(&self, x: &Example) -> ClassLabel {
        match self.active {
            Active::Under => self.under.predict(x),
            Active::Over => self.over.predict(x),
        }
    }

    fn learn(&mut self, x: &Example) {
        self.process_traced(x);
    }

    fn process(&mut self, x: &Example) -> ClassLabel {
        self.process_traced(x).0
    }
}
