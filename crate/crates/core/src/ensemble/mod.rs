//! Online bagging ensembles: OB, OOB, UOB, NOOB, NUOB and the NUOB/NOOB hybrid.
//!
//! All non-hybrid variants share one bagging core; they differ only in the
//! Poisson rate each incoming example receives.

mod hybrid;
pub mod lambda;
mod poisson;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::stream::{ClassLabel, DecayedClassSizes, Example, Neighbourhood, RandomSource, SlidingWindow};
use crate::tree::{HoeffdingTree, TreeConfig};

pub use hybrid::{Active, HybridModel, HYBRID_TRACKER_DECAY};
pub use lambda::{
    lambda_noob, lambda_nuob, lambda_oob, lambda_uob, safeness_level_maj, unsafeness_level_min,
};
pub use poisson::poisson_draw;

/// Anything that can be run prequentially over a stream.
pub trait StreamClassifier: Send {
    fn predict(&self, x: &Example) -> ClassLabel;

    fn learn(&mut self, x: &Example);

    /// Test-then-train: the returned prediction is made before `x` is learned.
    fn process(&mut self, x: &Example) -> ClassLabel {
        let prediction = self.predict(x);
        self.learn(x);
        prediction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Ob,
    Oob,
    Uob,
    Noob,
    Nuob,
    Hnob,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::Ob,
        ClassifierKind::Uob,
        ClassifierKind::Oob,
        ClassifierKind::Nuob,
        ClassifierKind::Noob,
        ClassifierKind::Hnob,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Ob => "ob",
            ClassifierKind::Oob => "oob",
            ClassifierKind::Uob => "uob",
            ClassifierKind::Noob => "noob",
            ClassifierKind::Nuob => "nuob",
            ClassifierKind::Hnob => "hnob",
        }
    }

    /// Substream tag for component seeding. The hybrid reuses the NUOB and
    /// NOOB tags so its members replay the standalone models exactly.
    fn stream_tag(self) -> u64 {
        match self {
            ClassifierKind::Ob => 1,
            ClassifierKind::Oob => 2,
            ClassifierKind::Uob => 3,
            ClassifierKind::Noob => 4,
            ClassifierKind::Nuob => 5,
            ClassifierKind::Hnob => 6,
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown classifier `{s}` (expected one of ob, oob, uob, noob, nuob, hnob)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub ensemble_size: usize,
    pub k: usize,
    pub window: usize,
    pub psi: f64,
    pub theta: f64,
    pub tree: TreeConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            ensemble_size: 15,
            k: 5,
            window: 500,
            psi: 2.0,
            theta: 0.9,
            tree: TreeConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NeighbourhoodParams {
    pub k: usize,
    pub psi: f64,
    pub window: SlidingWindow,
}

#[derive(Debug, Clone)]
pub enum LambdaPolicy {
    Ob,
    Oob(DecayedClassSizes),
    Uob(DecayedClassSizes),
    Noob(NeighbourhoodParams),
    Nuob(NeighbourhoodParams),
}

impl LambdaPolicy {
    pub fn for_kind(kind: ClassifierKind, config: &EnsembleConfig) -> Self {
        let neighbourhood = || {
            assert!(config.k >= 1 && config.k <= config.window, "need 1 <= k <= window");
            NeighbourhoodParams {
                k: config.k,
                psi: config.psi,
                window: SlidingWindow::new(config.window).expect("positive window"),
            }
        };
        match kind {
            ClassifierKind::Ob => LambdaPolicy::Ob,
            ClassifierKind::Oob => LambdaPolicy::Oob(DecayedClassSizes::new(config.theta)),
            ClassifierKind::Uob => LambdaPolicy::Uob(DecayedClassSizes::new(config.theta)),
            ClassifierKind::Noob => LambdaPolicy::Noob(neighbourhood()),
            ClassifierKind::Nuob => LambdaPolicy::Nuob(neighbourhood()),
            ClassifierKind::Hnob => panic!("the hybrid is not a single-policy ensemble"),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            LambdaPolicy::Ob => ClassifierKind::Ob,
            LambdaPolicy::Oob(_) => ClassifierKind::Oob,
            LambdaPolicy::Uob(_) => ClassifierKind::Uob,
            LambdaPolicy::Noob(_) => ClassifierKind::Noob,
            LambdaPolicy::Nuob(_) => ClassifierKind::Nuob,
        }
    }

    /// Rate for `x` plus the (un)safeness level that entered it, if any.
    ///
    /// Decayed class sizes absorb `x` before its rate is computed; the window
    /// is queried without `x` and only receives it in [`Self::absorb`].
    fn rate(&mut self, x: &Example) -> RateInfo {
        match self {
            LambdaPolicy::Ob => RateInfo::plain(1.0),
            LambdaPolicy::Oob(sizes) => {
                sizes.update(x.label);
                RateInfo::plain(lambda_oob(sizes, x.label))
            }
            LambdaPolicy::Uob(sizes) => {
                sizes.update(x.label);
                RateInfo::plain(lambda_uob(sizes, x.label))
            }
            LambdaPolicy::Noob(p) => {
                let counts = p.window.class_counts();
                match x.label {
                    ClassLabel::Majority => RateInfo::windowed(1.0, counts, None),
                    ClassLabel::Minority => {
                        let n = p.window.knn_majority_count(x, p.k);
                        let level = unsafeness_level_min(n.majority, n.considered, p.psi);
                        RateInfo::windowed(lambda_noob(counts, level, x.label), counts, Some((n, level)))
                    }
                }
            }
            LambdaPolicy::Nuob(p) => {
                let counts = p.window.class_counts();
                match x.label {
                    ClassLabel::Minority => RateInfo::windowed(1.0, counts, None),
                    ClassLabel::Majority => {
                        let n = p.window.knn_majority_count(x, p.k);
                        let level = if n.is_empty() {
                            1.0
                        } else {
                            safeness_level_maj(n.majority, n.considered)
                        };
                        let lambda = lambda_nuob(counts, level, p.psi, x.label);
                        RateInfo::windowed(lambda, counts, Some((n, level)))
                    }
                }
            }
        }
    }

    fn absorb(&mut self, x: &Example) {
        if let LambdaPolicy::Noob(p) | LambdaPolicy::Nuob(p) = self {
            p.window.push(x.clone()).expect("stream dimensionality is fixed");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RateInfo {
    lambda: f64,
    window_counts: Option<(usize, usize)>,
    neighbourhood: Option<(Neighbourhood, f64)>,
}

impl RateInfo {
    fn plain(lambda: f64) -> Self {
        RateInfo {
            lambda,
            window_counts: None,
            neighbourhood: None,
        }
    }

    fn windowed(lambda: f64, counts: (usize, usize), neighbourhood: Option<(Neighbourhood, f64)>) -> Self {
        RateInfo {
            lambda,
            window_counts: Some(counts),
            neighbourhood,
        }
    }
}

/// What one prequential step of an ensemble did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub prediction: ClassLabel,
    pub lambda: f64,
    /// `(N_maj, N_min)` of the window before the example entered it.
    pub window_counts: Option<(usize, usize)>,
    pub neighbourhood: Option<Neighbourhood>,
    /// Unsafeness (NOOB) or safeness (NUOB) level used in the rate.
    pub level: Option<f64>,
}

struct Component {
    tree: HoeffdingTree,
    rng: RandomSource,
}

/// Online bagging over Hoeffding trees with a pluggable rate policy.
pub struct EnsembleModel {
    components: Vec<Component>,
    policy: LambdaPolicy,
}

impl EnsembleModel {
    pub fn new(kind: ClassifierKind, config: &EnsembleConfig, seed: u64) -> Self {
        let policy = LambdaPolicy::for_kind(kind, config);
        Self::with_policy(policy, config, seed)
    }

    pub fn with_policy(policy: LambdaPolicy, config: &EnsembleConfig, seed: u64) -> Self {
        assert!(config.ensemble_size >= 1, "ensemble needs at least one component");
        let tag = policy.kind().stream_tag();
        let components = (0..config.ensemble_size as u64)
            .map(|i| Component {
                tree: HoeffdingTree::new(config.tree),
                rng: RandomSource::substream(seed, (tag << 32) | i),
            })
            .collect();
        EnsembleModel { components, policy }
    }

    pub fn kind(&self) -> ClassifierKind {
        self.policy.kind()
    }

    pub fn policy(&self) -> &LambdaPolicy {
        &self.policy
    }

    pub fn size(&self) -> usize {
        self.components.len()
    }

    pub fn trees(&self) -> impl Iterator<Item = &HoeffdingTree> {
        self.components.iter().map(|c| &c.tree)
    }

    /// Minority votes among components.
    pub fn minority_votes(&self, x: &Example) -> usize {
        self.components
            .iter()
            .filter(|c| c.tree.predict_one(x).0 == ClassLabel::Minority)
            .count()
    }

    /// Full test-then-train step: vote, rate, per-component Poisson training,
    /// then auxiliary state update.
    pub fn process_example(&mut self, x: &Example) -> Step {
        let prediction = StreamClassifier::predict(self, x);
        let info = self.train(x);
        Step {
            prediction,
            lambda: info.lambda,
            window_counts: info.window_counts,
            neighbourhood: info.neighbourhood.map(|(n, _)| n),
            level: info.neighbourhood.map(|(_, l)| l),
        }
    }

    fn train(&mut self, x: &Example) -> RateInfo {
        let info = self.policy.rate(x);
        for c in &mut self.components {
            let l = poisson_draw(info.lambda, &mut c.rng).expect("rate policies yield finite non-negative rates");
            if l > 0 {
                c.tree.learn_one(x, l);
            }
        }
        self.policy.absorb(x);
        info
    }
}

impl StreamClassifier for EnsembleModel {
    fn predict(&self, x: &Example) -> ClassLabel {
        let minority = self.minority_votes(x);
        if minority * 2 > self.components.len() {
            ClassLabel::Minority
        } else {
            ClassLabel::Majority
        }
    }

    fn learn(&mut self, x: &Example) {
        self.train(x);
    }

    fn process(&mut self, x: &Example) -> ClassLabel {
        self.process_example(x).prediction
    }
}

/// Builds any of the six classifiers behind the common trait.
pub fn build_classifier(kind: ClassifierKind, config: &EnsembleConfig, seed: u64) -> Box<dyn StreamClassifier> {
    match kind {
        ClassifierKind::Hnob => Box::new(HybridModel::new(config, seed)),
        other => Box::new(EnsembleModel::new(other, config, seed)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(f: &[f64], label: ClassLabel, index: u64) -> Example {
        Example::new(f.to_vec(), label, index)
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in ClassifierKind::ALL {
            assert_eq!(k.as_str().parse::<ClassifierKind>().unwrap(), k);
        }
        assert!("vfdt".parse::<ClassifierKind>().is_err());
    }

    #[test]
    fn ob_always_uses_unit_rate() {
        let mut m = EnsembleModel::new(ClassifierKind::Ob, &EnsembleConfig::default(), 1);
        for i in 0..50 {
            let label = if i % 7 == 0 { ClassLabel::Minority } else { ClassLabel::Majority };
            assert_eq!(m.process_example(&ex(&[0.1, 0.2], label, i)).lambda, 1.0);
        }
    }

    #[test]
    fn fresh_model_predicts_majority_and_still_trains() {
        let mut m = EnsembleModel::new(ClassifierKind::Ob, &EnsembleConfig::default(), 2);
        let step = m.process_example(&ex(&[0.1, 0.2], ClassLabel::Minority, 0));
        assert_eq!(step.prediction, ClassLabel::Majority);
        assert!(m.trees().any(|t| t.node_count() > 0));
    }

    #[test]
    fn noob_rate_for_minority_in_majority_neighbourhood() {
        let config = EnsembleConfig::default();
        let mut window = SlidingWindow::new(500).unwrap();
        // 450 majority points clustered near the origin, 50 minority far away.
        for i in 0..500u64 {
            let (f, label) = if i < 450 {
                ([0.01 * (i % 10) as f64, 0.0], ClassLabel::Majority)
            } else {
                ([0.9, 0.9], ClassLabel::Minority)
            };
            window.push(ex(&f, label, i)).unwrap();
        }
        let policy = LambdaPolicy::Noob(NeighbourhoodParams { k: 5, psi: 2.0, window });
        let mut m = EnsembleModel::with_policy(policy, &config, 3);
        let step = m.process_example(&ex(&[0.0, 0.0], ClassLabel::Minority, 500));
        assert_eq!(step.window_counts, Some((450, 50)));
        assert!((step.lambda - 54.0).abs() < 1e-12);
    }

    #[test]
    fn window_sees_example_only_after_rate() {
        let mut m = EnsembleModel::new(ClassifierKind::Nuob, &EnsembleConfig::default(), 4);
        let first = m.process_example(&ex(&[0.5, 0.5], ClassLabel::Majority, 0));
        assert_eq!(first.window_counts, Some((0, 0)));
        assert!(first.neighbourhood.unwrap().is_empty());
        let second = m.process_example(&ex(&[0.5, 0.5], ClassLabel::Majority, 1));
        assert_eq!(second.window_counts, Some((1, 0)));
        // No minority in the window yet: majority examples are fully undersampled.
        assert_eq!(second.lambda, 0.0);
    }

    #[test]
    fn oob_rate_counts_current_example() {
        let mut m = EnsembleModel::new(ClassifierKind::Oob, &EnsembleConfig::default(), 5);
        for i in 0..20 {
            m.process_example(&ex(&[0.5, 0.5], ClassLabel::Majority, i));
        }
        let step = m.process_example(&ex(&[0.5, 0.5], ClassLabel::Minority, 20));
        // sizes: maj = 0.9 * (1 - 0.9^20) / 0.1, min = 1
        let maj = 0.9 * (1.0 - 0.9f64.powi(20)) / 0.1;
        assert!((step.lambda - maj).abs() < 1e-9, "{}", step.lambda);
    }
}
