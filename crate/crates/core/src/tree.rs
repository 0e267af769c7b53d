//! Hoeffding tree (VFDT) over numeric attributes with binary splits.
//!
//! Leaves keep per-class weights and, for every attribute, one Gaussian
//! summary per class. Every `grace_period` units of training weight a leaf
//! scores ten candidate thresholds per attribute by information gain and
//! splits once the Hoeffding bound separates the two best candidates.

use crate::stream::{ClassLabel, Example};

const NUM_CLASSES: usize = 2;
const CANDIDATE_THRESHOLDS: usize = 10;
const MIN_BRANCH_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafPrediction {
    MajorityClass,
    NaiveBayes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub grace_period: usize,
    pub split_confidence: f64,
    pub tie_threshold: f64,
    pub leaf_prediction: LeafPrediction,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            grace_period: 200,
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            leaf_prediction: LeafPrediction::MajorityClass,
        }
    }
}

/// `sqrt(R^2 ln(1/delta) / 2n)`.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> f64 {
    (range * range * (1.0 / delta).ln() / (2.0 * n)).sqrt()
}

/// Weighted running mean/variance of one attribute for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEstimator {
    pub weight: f64,
    pub mean: f64,
    m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for GaussianEstimator {
    fn default() -> Self {
        GaussianEstimator {
            weight: 0.0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl GaussianEstimator {
    pub fn add(&mut self, value: f64, weight: f64) {
        if self.weight == 0.0 {
            self.weight = weight;
            self.mean = value;
            self.m2 = 0.0;
        } else {
            let total = self.weight + weight;
            let delta = value - self.mean;
            self.mean += delta * weight / total;
            self.m2 += weight * delta * (value - self.mean);
            self.weight = total;
        }
        self.min = self.min.min(value);
        self.max = self.max.max(value);
    }

    pub fn variance(&self) -> f64 {
        if self.weight > 1.0 {
            self.m2 / (self.weight - 1.0)
        } else {
            0.0
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Estimated weight at or below `threshold`.
    pub fn weight_below(&self, threshold: f64) -> f64 {
        if self.weight == 0.0 || threshold < self.min {
            0.0
        } else if threshold >= self.max {
            self.weight
        } else {
            let sd = self.std_dev();
            if sd == 0.0 {
                if threshold >= self.mean {
                    self.weight
                } else {
                    0.0
                }
            } else {
                let z = (threshold - self.mean) / (sd * std::f64::consts::SQRT_2);
                self.weight * 0.5 * (1.0 + libm::erf(z))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafStats {
    pub class_weights: [f64; NUM_CLASSES],
    pub observers: Vec<[GaussianEstimator; NUM_CLASSES]>,
    weight_at_last_attempt: f64,
}

impl LeafStats {
    fn new(dims: usize, class_weights: [f64; NUM_CLASSES]) -> Self {
        LeafStats {
            class_weights,
            observers: vec![[GaussianEstimator::default(); NUM_CLASSES]; dims],
            weight_at_last_attempt: class_weights.iter().sum(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.class_weights.iter().sum()
    }

    fn learn(&mut self, x: &Example, weight: f64) {
        let c = x.label.index();
        self.class_weights[c] += weight;
        for (obs, &v) in self.observers.iter_mut().zip(&x.features) {
            obs[c].add(v, weight);
        }
    }

    fn is_pure(&self) -> bool {
        self.class_weights.iter().filter(|&&w| w > 0.0).count() < 2
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split {
        attribute: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(LeafStats),
}

/// A scored binary split candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub attribute: usize,
    pub threshold: f64,
    pub merit: f64,
    pub left: [f64; NUM_CLASSES],
    pub right: [f64; NUM_CLASSES],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitDecision {
    /// Leaf holds a single class; nothing to gain.
    Pure,
    Keep { best_merit: f64, second_merit: f64, epsilon: f64 },
    Split(SplitCandidate),
}

fn entropy(dist: &[f64; NUM_CLASSES]) -> f64 {
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    dist.iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

/// Information gain of splitting `pre` into `left`/`right`; `-inf` when fewer
/// than two branches carry a minimal share of the weight.
pub fn information_gain(
    pre: &[f64; NUM_CLASSES],
    left: &[f64; NUM_CLASSES],
    right: &[f64; NUM_CLASSES],
) -> f64 {
    let wl: f64 = left.iter().sum();
    let wr: f64 = right.iter().sum();
    let total = wl + wr;
    if total <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let big_enough = [wl, wr]
        .iter()
        .filter(|&&w| w / total > MIN_BRANCH_FRACTION)
        .count();
    if big_enough < 2 {
        return f64::NEG_INFINITY;
    }
    entropy(pre) - (wl / total) * entropy(left) - (wr / total) * entropy(right)
}

fn best_split_for_attribute(
    attribute: usize,
    obs: &[GaussianEstimator; NUM_CLASSES],
    pre: &[f64; NUM_CLASSES],
) -> Option<SplitCandidate> {
    let lo = obs.iter().map(|o| o.min).fold(f64::INFINITY, f64::min);
    let hi = obs.iter().map(|o| o.max).fold(f64::NEG_INFINITY, f64::max);
    if lo >= hi {
        return None;
    }
    let mut best: Option<SplitCandidate> = None;
    for i in 0..CANDIDATE_THRESHOLDS {
        let threshold = lo + (hi - lo) * (i + 1) as f64 / (CANDIDATE_THRESHOLDS + 1) as f64;
        let mut left = [0.0; NUM_CLASSES];
        let mut right = [0.0; NUM_CLASSES];
        for c in 0..NUM_CLASSES {
            let below = obs[c].weight_below(threshold);
            left[c] = below;
            right[c] = (obs[c].weight - below).max(0.0);
        }
        let merit = information_gain(pre, &left, &right);
        if best.is_none_or(|b| merit > b.merit) {
            best = Some(SplitCandidate {
                attribute,
                threshold,
                merit,
                left,
                right,
            });
        }
    }
    best
}

/// Applies the Hoeffding split rule to `leaf`. The "no split" option with
/// merit 0 always takes part in the comparison.
pub fn attempt_split(leaf: &LeafStats, config: &TreeConfig) -> SplitDecision {
    if leaf.is_pure() {
        return SplitDecision::Pure;
    }
    let mut candidates: Vec<SplitCandidate> = leaf
        .observers
        .iter()
        .enumerate()
        .filter_map(|(a, obs)| best_split_for_attribute(a, obs, &leaf.class_weights))
        .filter(|c| c.merit.is_finite())
        .collect();
    candidates.sort_by(|a, b| b.merit.total_cmp(&a.merit));
    let best = candidates.first().copied();
    let best_merit = best.map_or(0.0, |c| c.merit.max(0.0));
    let second_merit = candidates.get(1).map_or(0.0, |c| c.merit.max(0.0));
    let range = (NUM_CLASSES as f64).log2();
    let epsilon = hoeffding_bound(range, config.split_confidence, leaf.total_weight());
    decide(best, best_merit, second_merit, epsilon, config.tie_threshold)
}

fn decide(
    best: Option<SplitCandidate>,
    best_merit: f64,
    second_merit: f64,
    epsilon: f64,
    tie_threshold: f64,
) -> SplitDecision {
    match best {
        Some(c)
            if c.merit > 0.0
                && (best_merit - second_merit > epsilon || epsilon < tie_threshold) =>
        {
            SplitDecision::Split(c)
        }
        _ => SplitDecision::Keep {
            best_merit,
            second_merit,
            epsilon,
        },
    }
}

/// Hoeffding tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone)]
pub struct HoeffdingTree {
    config: TreeConfig,
    nodes: Vec<Node>,
    dims: Option<usize>,
}

impl HoeffdingTree {
    pub fn new(config: TreeConfig) -> Self {
        assert!(config.grace_period >= 1, "grace period must be at least 1");
        HoeffdingTree {
            config,
            nodes: Vec::new(),
            dims: None,
        }
    }

    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn split_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.len() - self.split_count()
    }

    fn leaf_index(&self, features: &[f64]) -> Option<usize> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(_) => return Some(at),
                Node::Split {
                    attribute,
                    threshold,
                    left,
                    right,
                } => {
                    at = if features[*attribute] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Statistics of the leaf `features` routes to, if the tree has grown one.
    pub fn leaf_for(&self, features: &[f64]) -> Option<&LeafStats> {
        self.leaf_index(features).map(|i| match &self.nodes[i] {
            Node::Leaf(s) => s,
            Node::Split { .. } => unreachable!(),
        })
    }

    /// Trains on `x` with integer weight `weight`, exactly as `weight`
    /// consecutive unit updates would.
    pub fn learn_one(&mut self, x: &Example, weight: u32) {
        if weight == 0 {
            return;
        }
        let dims = *self.dims.get_or_insert(x.dims());
        debug_assert_eq!(dims, x.dims());
        if self.nodes.is_empty() {
            self.nodes.push(Node::Leaf(LeafStats::new(dims, [0.0; NUM_CLASSES])));
        }
        let grace = self.config.grace_period as f64;
        for _ in 0..weight {
            let at = self.leaf_index(&x.features).expect("tree has a root");
            let ready = match &mut self.nodes[at] {
                Node::Leaf(leaf) => {
                    leaf.learn(x, 1.0);
                    leaf.total_weight() - leaf.weight_at_last_attempt >= grace
                }
                Node::Split { .. } => unreachable!(),
            };
            if ready {
                self.try_split(at, dims);
            }
        }
    }

    fn try_split(&mut self, at: usize, dims: usize) {
        let decision = match &mut self.nodes[at] {
            Node::Leaf(leaf) => {
                leaf.weight_at_last_attempt = leaf.total_weight();
                attempt_split(leaf, &self.config)
            }
            Node::Split { .. } => unreachable!(),
        };
        if let SplitDecision::Split(c) = decision {
            let left = self.nodes.len();
            self.nodes.push(Node::Leaf(LeafStats::new(dims, c.left)));
            self.nodes.push(Node::Leaf(LeafStats::new(dims, c.right)));
            self.nodes[at] = Node::Split {
                attribute: c.attribute,
                threshold: c.threshold,
                left,
                right: left + 1,
            };
        }
    }

    /// Predicted label and per-class scores `[minority, majority]`.
    pub fn predict_one(&self, x: &Example) -> (ClassLabel, [f64; NUM_CLASSES]) {
        let Some(leaf) = self.leaf_for(&x.features) else {
            return (ClassLabel::Majority, [0.5, 0.5]);
        };
        let scores = match self.config.leaf_prediction {
            LeafPrediction::MajorityClass => leaf.class_weights,
            LeafPrediction::NaiveBayes => naive_bayes_scores(leaf, &x.features),
        };
        let total: f64 = scores.iter().sum();
        if total <= 0.0 {
            return (ClassLabel::Majority, [0.5, 0.5]);
        }
        let scores = [scores[0] / total, scores[1] / total];
        let label = if scores[0] > scores[1] {
            ClassLabel::Minority
        } else {
            ClassLabel::Majority
        };
        (label, scores)
    }
}

fn naive_bayes_scores(leaf: &LeafStats, features: &[f64]) -> [f64; NUM_CLASSES] {
    let total = leaf.total_weight();
    let mut out = [0.0; NUM_CLASSES];
    for (c, slot) in out.iter_mut().enumerate() {
        if leaf.class_weights[c] <= 0.0 {
            continue;
        }
        let mut log_p = (leaf.class_weights[c] / total).ln();
        for (obs, &v) in leaf.observers.iter().zip(features) {
            let o = &obs[c];
            let sd = o.std_dev().max(1e-3);
            let z = (v - o.mean) / sd;
            log_p += -0.5 * z * z - sd.ln();
        }
        *slot = log_p;
    }
    let top = out
        .iter()
        .zip(&leaf.class_weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&s, _)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    for (c, slot) in out.iter_mut().enumerate() {
        *slot = if leaf.class_weights[c] > 0.0 {
            (*slot - top).exp()
        } else {
            0.0
        };
    }
    out
}
