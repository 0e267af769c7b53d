//! Stream primitives: labeled examples, the bounded sliding window with its
//! neighbourhood query, decayed class-size tracking, and seeded randomness.

use std::collections::VecDeque;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::StreamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    Minority,
    Majority,
}

impl ClassLabel {
    /// Slot of this class in per-class arrays (`[minority, majority]`).
    #[inline]
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Minority => 0,
            ClassLabel::Majority => 1,
        }
    }

    pub fn other(self) -> ClassLabel {
        match self {
            ClassLabel::Minority => ClassLabel::Majority,
            ClassLabel::Majority => ClassLabel::Minority,
        }
    }

    /// Short token used in stream dumps.
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Minority => "min",
            ClassLabel::Majority => "maj",
        }
    }

    pub fn parse(token: &str) -> Option<ClassLabel> {
        match token {
            "min" => Some(ClassLabel::Minority),
            "maj" => Some(ClassLabel::Majority),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub features: Vec<f64>,
    pub label: ClassLabel,
    pub index: u64,
}

impl Example {
    pub fn new(features: Vec<f64>, label: ClassLabel, index: u64) -> Self {
        Example {
            features,
            label,
            index,
        }
    }

    pub fn dims(&self) -> usize {
        self.features.len()
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Outcome of a nearest-neighbour query over the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbourhood {
    /// Majority-labeled examples among the neighbours.
    pub majority: usize,
    /// Number of neighbours actually found, `min(k, |window|)` minus self.
    pub considered: usize,
}

impl Neighbourhood {
    pub fn is_empty(&self) -> bool {
        self.considered == 0
    }

    pub fn minority(&self) -> usize {
        self.considered - self.majority
    }
}

/// Bounded FIFO of the most recent examples with maintained class counters.
#[derive(Debug, Clone)]
pub struct SlidingWindow {
    capacity: usize,
    buffer: VecDeque<Example>,
    dims: Option<usize>,
    count_majority: usize,
    count_minority: usize,
}

impl SlidingWindow {
    pub fn new(capacity: usize) -> Result<Self, StreamError> {
        if capacity == 0 {
            return Err(StreamError::ZeroCapacity);
        }
        Ok(SlidingWindow {
            capacity,
            buffer: VecDeque::with_capacity(capacity + 1),
            dims: None,
            count_majority: 0,
            count_minority: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Example> {
        self.buffer.iter()
    }

    /// Appends `x`, evicting and returning the oldest example once the window
    /// is over capacity.
    pub fn push(&mut self, x: Example) -> Result<Option<Example>, StreamError> {
        match self.dims {
            Some(d) if d != x.dims() => {
                return Err(StreamError::DimensionMismatch {
                    expected: d,
                    found: x.dims(),
                })
            }
            None => self.dims = Some(x.dims()),
            _ => {}
        }
        self.bump(x.label, true);
        self.buffer.push_back(x);
        if self.buffer.len() > self.capacity {
            let old = self.buffer.pop_front().expect("non-empty buffer");
            self.bump(old.label, false);
            Ok(Some(old))
        } else {
            Ok(None)
        }
    }

    fn bump(&mut self, label: ClassLabel, add: bool) {
        let slot = match label {
            ClassLabel::Majority => &mut self.count_majority,
            ClassLabel::Minority => &mut self.count_minority,
        };
        if add {
            *slot += 1;
        } else {
            *slot -= 1;
        }
    }

    /// `(N_maj, N_min)` as maintained counters.
    pub fn class_counts(&self) -> (usize, usize) {
        (self.count_majority, self.count_minority)
    }

    /// Counts majority examples among the `k` nearest (Euclidean) window
    /// examples to `query`. A window entry with the same arrival index as the
    /// query is skipped. Equal distances are resolved in favour of the more
    /// recent entry.
    pub fn knn_majority_count(&self, query: &Example, k: usize) -> Neighbourhood {
        let k = k.max(1);
        // (squared distance, position, label), kept sorted best-first.
        let mut best: Vec<(f64, usize, ClassLabel)> = Vec::with_capacity(k + 1);
        for (pos, ex) in self.buffer.iter().enumerate() {
            if ex.index == query.index {
                continue;
            }
            let d = squared_distance(&ex.features, &query.features);
            if best.len() == k {
                let (wd, wpos, _) = best[k - 1];
                if !(d < wd || (d == wd && pos > wpos)) {
                    continue;
                }
                best.pop();
            }
            let at = best
                .iter()
                .position(|&(bd, bpos, _)| d < bd || (d == bd && pos > bpos))
                .unwrap_or(best.len());
            best.insert(at, (d, pos, ex.label));
        }
        Neighbourhood {
            majority: best
                .iter()
                .filter(|(_, _, l)| *l == ClassLabel::Majority)
                .count(),
            considered: best.len(),
        }
    }
}

/// Exponentially forgotten per-class arrival counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayedClassSizes {
    theta: f64,
    pub size_majority: f64,
    pub size_minority: f64,
}

impl DecayedClassSizes {
    pub fn new(theta: f64) -> Self {
        assert!(
            theta > 0.0 && theta < 1.0,
            "forgetting degree must lie in (0, 1), got {theta}"
        );
        DecayedClassSizes {
            theta,
            size_majority: 0.0,
            size_minority: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_sizes(theta: f64, size_majority: f64, size_minority: f64) -> Self {
        DecayedClassSizes {
            size_majority,
            size_minority,
            ..DecayedClassSizes::new(theta)
        }
    }

    pub fn update(&mut self, label: ClassLabel) {
        self.size_majority *= self.theta;
        self.size_minority *= self.theta;
        match label {
            ClassLabel::Majority => self.size_majority += 1.0,
            ClassLabel::Minority => self.size_minority += 1.0,
        }
    }

    pub fn size(&self, label: ClassLabel) -> f64 {
        match label {
            ClassLabel::Majority => self.size_majority,
            ClassLabel::Minority => self.size_minority,
        }
    }
}

/// Seeded, splittable random stream. Substreams of one seed are independent
/// ChaCha streams, so component draws do not depend on evaluation order.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomSource { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(f: &[f64], label: ClassLabel, index: u64) -> Example {
        Example::new(f.to_vec(), label, index)
    }

    use ClassLabel::{Majority as MAJ, Minority as MIN};

    #[test]
    fn push_under_capacity_keeps_everything() {
        let mut w = SlidingWindow::new(3).unwrap();
        assert_eq!(w.push(ex(&[0.1, 0.2], MAJ, 0)).unwrap(), None);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn push_over_capacity_evicts_oldest() {
        let mut w = SlidingWindow::new(3).unwrap();
        for i in 0..3 {
            w.push(ex(&[i as f64, 0.0], MAJ, i)).unwrap();
        }
        let evicted = w.push(ex(&[3.0, 0.0], MIN, 3)).unwrap().unwrap();
        assert_eq!(evicted.index, 0);
        let left: Vec<u64> = w.iter().map(|e| e.index).collect();
        assert_eq!(left, vec![1, 2, 3]);
        assert_eq!(w.class_counts(), (2, 1));
    }

    #[test]
    fn six_hundred_pushes_into_five_hundred() {
        let mut w = SlidingWindow::new(500).unwrap();
        let mut evicted = 0;
        for i in 0..600 {
            if w.push(ex(&[0.0, 0.0], MAJ, i)).unwrap().is_some() {
                evicted += 1;
            }
        }
        assert_eq!(w.len(), 500);
        assert_eq!(evicted, 100);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut w = SlidingWindow::new(3).unwrap();
        w.push(ex(&[0.0, 0.0], MAJ, 0)).unwrap();
        let err = w.push(ex(&[0.0, 0.0, 0.0], MAJ, 1)).unwrap_err();
        assert_eq!(
            err,
            StreamError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn zero_capacity_is_rejected() {
        assert_eq!(SlidingWindow::new(0).unwrap_err(), StreamError::ZeroCapacity);
    }

    #[test]
    fn class_counts_small_cases() {
        let mut w = SlidingWindow::new(10).unwrap();
        assert_eq!(w.class_counts(), (0, 0));
        w.push(ex(&[0.0, 0.0], MAJ, 0)).unwrap();
        w.push(ex(&[0.0, 0.0], MAJ, 1)).unwrap();
        w.push(ex(&[0.0, 0.0], MIN, 2)).unwrap();
        assert_eq!(w.class_counts(), (2, 1));
    }

    #[test]
    fn class_counts_match_recount_after_seeded_pushes() {
        let mut rng = RandomSource::new(17);
        let mut w = SlidingWindow::new(500).unwrap();
        for i in 0..2_000 {
            let label = if rng.uniform() < 0.1 { MIN } else { MAJ };
            w.push(ex(&[rng.uniform(), rng.uniform()], label, i)).unwrap();
        }
        let (maj, min) = w.class_counts();
        let recount_min = w.iter().filter(|e| e.label == MIN).count();
        assert_eq!(maj + min, 500);
        assert_eq!(min, recount_min);
    }

    // Neighbourhood examples use 1-D points padded with a constant second
    // coordinate so they satisfy d >= 2 without changing distances.
    #[test]
    fn knn_one_dimensional_examples() {
        let mut w = SlidingWindow::new(10).unwrap();
        w.push(ex(&[0.1, 0.0], MAJ, 0)).unwrap();
        w.push(ex(&[0.2, 0.0], MAJ, 1)).unwrap();
        w.push(ex(&[0.9, 0.0], MIN, 2)).unwrap();
        let q = ex(&[0.15, 0.0], MIN, 10);
        assert_eq!(w.knn_majority_count(&q, 2).majority, 2);

        let mut w = SlidingWindow::new(10).unwrap();
        w.push(ex(&[0.0, 0.0], MAJ, 0)).unwrap();
        w.push(ex(&[0.5, 0.0], MIN, 1)).unwrap();
        w.push(ex(&[1.0, 0.0], MAJ, 2)).unwrap();
        let q = ex(&[0.5, 0.0], MIN, 10);
        let n = w.knn_majority_count(&q, 3);
        assert_eq!(n.majority, 2);
        assert_eq!(n.considered, 3);
    }

    #[test]
    fn knn_minority_only_window() {
        let mut w = SlidingWindow::new(10).unwrap();
        for i in 0..5 {
            w.push(ex(&[i as f64 * 0.1, 0.3], MIN, i)).unwrap();
        }
        assert_eq!(w.knn_majority_count(&ex(&[0.7, 0.7], MAJ, 99), 5).majority, 0);
    }

    #[test]
    fn knn_empty_window_flags_empty() {
        let w = SlidingWindow::new(10).unwrap();
        let n = w.knn_majority_count(&ex(&[0.5, 0.5], MIN, 0), 5);
        assert!(n.is_empty());
        assert_eq!(n.majority, 0);
    }

    #[test]
    fn knn_excludes_query_itself() {
        let mut w = SlidingWindow::new(10).unwrap();
        let q = ex(&[0.5, 0.5], MIN, 3);
        w.push(ex(&[0.9, 0.9], MAJ, 1)).unwrap();
        w.push(q.clone()).unwrap();
        let n = w.knn_majority_count(&q, 1);
        assert_eq!(n.considered, 1);
        assert_eq!(n.majority, 1);
    }

    #[test]
    fn knn_ties_prefer_recent_examples() {
        let mut w = SlidingWindow::new(10).unwrap();
        // Both at distance 0.1 from the query; the later one is minority.
        w.push(ex(&[0.4, 0.0], MAJ, 0)).unwrap();
        w.push(ex(&[0.6, 0.0], MIN, 1)).unwrap();
        let q = ex(&[0.5, 0.0], MIN, 2);
        assert_eq!(w.knn_majority_count(&q, 1).majority, 0);

        let mut w = SlidingWindow::new(10).unwrap();
        w.push(ex(&[0.6, 0.0], MIN, 0)).unwrap();
        w.push(ex(&[0.4, 0.0], MAJ, 1)).unwrap();
        assert_eq!(w.knn_majority_count(&q, 1).majority, 1);
    }

    #[test]
    fn decayed_update_steps() {
        let mut s = DecayedClassSizes::new(0.9);
        s.update(MAJ);
        assert_eq!((s.size_majority, s.size_minority), (1.0, 0.0));
        s.update(MIN);
        assert!((s.size_majority - 0.9).abs() < 1e-15);
        assert_eq!(s.size_minority, 1.0);
    }

    #[test]
    fn decayed_sizes_reach_geometric_limit() {
        let mut s = DecayedClassSizes::new(0.9);
        for _ in 0..10_000 {
            s.update(MAJ);
        }
        assert!((s.size_majority - 10.0).abs() < 1e-9);
        assert_eq!(s.size_minority, 0.0);
    }

    #[test]
    fn substreams_differ_and_replay() {
        let mut a = RandomSource::substream(5, 1);
        let mut b = RandomSource::substream(5, 2);
        let mut a2 = RandomSource::substream(5, 1);
        let xa: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let xa2: Vec<u64> = (0..4).map(|_| a2.next_u64()).collect();
        assert_ne!(xa, xb);
        assert_eq!(xa, xa2);
        let u = RandomSource::new(9).uniform();
        assert!((0.0..1.0).contains(&u));
    }
}
